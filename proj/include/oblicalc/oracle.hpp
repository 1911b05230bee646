#pragma once

// Possible-worlds check of the obligation store: every time-monotone
// situation up to a small depth is a world, O(s', s) holds when s' satisfies
// every formula obligatory at s, and Oblg is evaluated literally over O.

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "oblicalc/monitor.hpp"

namespace oblicalc {

struct WorldSet {
  std::vector<Situation> situations;
};

/// Σ_{k≤depth} |alphabet|^k · C(|grid|+k−1, k): time-monotone sequences over
/// untimed actions with times from the grid.
std::uint64_t count_time_monotone(std::size_t alphabet, std::size_t grid, std::size_t depth);

/// The theory's alphabet crossed with the grid.
std::vector<GroundAction> ground_alphabet(const Theory& theory, const std::vector<TimePoint>& grid);

inline constexpr std::size_t kMaxOracleDepth = 5;
inline constexpr std::size_t kMaxOracleAlphabet = 4;
inline constexpr std::uint64_t kDefaultOracleBudget = 100000;

/// All do-chains of length ≤ depth with non-decreasing times.
/// Throws BudgetExceeded past `budget` situations.
WorldSet enumerate_situations(TimePoint epoch, const std::vector<GroundAction>& alphabet, std::size_t depth,
                              std::uint64_t budget = kDefaultOracleBudget);

/// Obligations in force at the end of `s`, computed declaratively: a trigger
/// occurrence whose window still covers start(s) and no matching stopper
/// strictly between the trigger and s.
std::set<Formula> store_at(const Theory& theory, const Situation& s);

/// (∀s'). O(s', s) ⊃ φ[s'] with O induced from `store`.
bool modal_oblg(const Evaluator& ev, const WorldSet& ws, const std::set<Formula>& store, const Formula& phi);

struct OracleOptions {
  std::size_t depth = 3;
  std::vector<TimePoint> grid{TimePoint{1}, TimePoint{2}, TimePoint{3}};
  std::uint64_t budget = kDefaultOracleBudget;
  bool executable_only = false;
  bool mutate_no_discharge = false;
};

struct Discrepancy {
  Situation situation;
  std::string formula;
  bool monitor = false;
  bool modal = false;
};

struct EquivalenceReport {
  std::size_t worlds = 0;
  std::size_t checks = 0;
  std::size_t unsatisfiable = 0;
  std::vector<Discrepancy> discrepancies;
  bool ok() const { return discrepancies.empty(); }
};

/// Compares the monitor's oblg with modal_oblg at every world for every
/// formula in either store there, and checks that the conjunction of
/// each satisfiable store is modally obligatory.
EquivalenceReport check_equivalence(std::shared_ptr<const Theory> theory, const OracleOptions& options);

}  // namespace oblicalc
