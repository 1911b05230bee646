#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "oblicalc/error.hpp"
#include "oblicalc/formula.hpp"
#include "oblicalc/terms.hpp"

namespace oblicalc {

struct ActionDecl {
  ActionSignature sig;
  std::optional<Formula> precondition;  // Π_A over the parameters and `s`
  SourceLoc loc;
  SourceLoc poss_loc;
};

struct FluentDecl {
  std::string name;
  std::vector<Param> params;
  bool functional = false;
  Sort value_sort = Sort::Object;  // functional fluents only
  std::optional<Formula> ssa;      // Φ_F over the parameters, `a`, `s` (and `value`)
  SourceLoc loc;
  SourceLoc ssa_loc;
};

enum class ObligationType : std::uint8_t {
  Punctual,
  AchievementPreemptive,
  AchievementNonpreemptive,
  Maintenance,
  Perdurant,
};

std::string_view obligation_type_name(ObligationType t);
bool is_achievement(ObligationType t);

/// An obligation-producing action: executing `trigger` makes `obliged`
/// (with the trigger's parameters bound) obligatory for `window` time units.
struct ObligationDecl {
  std::string trigger;
  Formula obliged;  // situation-suppressed
  ObligationType type = ObligationType::AchievementNonpreemptive;
  TimePoint window{0};
  std::optional<TimePoint> deadline_offset;  // perdurant only
  std::vector<std::string> stoppers;         // action functors that discharge it
  SourceLoc loc;
};

/// Comp(φ) entry: a violated instance of `pattern` is compensated by the
/// obligations in `compensations` (same variable binding).
struct CompensationRule {
  Formula pattern;
  std::vector<Formula> compensations;
  TimePoint window{10};
  SourceLoc loc;
};

/// Parsed basic action theory. Immutable after parsing; safe to share.
class Theory {
 public:
  static constexpr std::string_view kValueVariable = "value";

  std::string name;
  TimePoint epoch{0};
  std::vector<ActionDecl> actions;
  std::vector<FluentDecl> fluents;
  std::set<GroundAtom> rigids;
  std::set<GroundAtom> init;                           // relational fluents true at S0
  std::map<GroundAtom, std::string> init_functions;    // functional fluent values at S0
  std::vector<ObligationDecl> obligations;
  std::vector<CompensationRule> compensations;
  std::vector<GroundAtom> alphabet;                     // untimed ground actions for the oracle
  SourceLoc epoch_loc;

  const ActionDecl* find_action(std::string_view name) const;
  const FluentDecl* find_fluent(std::string_view name) const;
  bool is_rigid_predicate(std::string_view name) const;

  /// Checks a ground action against its declaration; throws SortError/EvalError.
  void check_action(const GroundAction& a) const;

  /// Object constants mentioned anywhere in the theory, sorted.
  std::vector<std::string> constants() const;
  /// Time literals mentioned anywhere in the theory, plus the epoch.
  std::vector<TimePoint> time_literals() const;

  /// Comp(φ) for a ground suppressed formula; empty if not compensable.
  std::vector<Formula> comp(const Formula& phi) const;
  /// Window of the compensation rule matching φ, if any.
  std::optional<TimePoint> comp_window(const Formula& phi) const;
};

/// Action declarations as signatures.
std::vector<ActionSignature> signatures(const Theory& theory);

struct ParseResult {
  std::optional<Theory> theory;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return theory.has_value() && diagnostics.empty(); }
};

ParseResult parse_theory(std::string_view text, std::string name = "theory");

/// Invariants of a basic action theory. An empty result means valid.
std::vector<Diagnostic> validate_theory(const Theory& theory);

/// Concrete syntax of `theory`; parse_theory(print_theory(t)) reproduces t.
std::string print_theory(const Theory& theory);

/// One ground action in trace syntax, e.g. `unlock(D, 10)`.
GroundAction parse_ground_action(std::string_view text);

/// Malformed trace file; `line` is 1-based.
class TraceSyntaxError : public Error {
 public:
  TraceSyntaxError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line(line) {}
  std::size_t line;
};

/// One ground action per line; blank lines and `#` comments are skipped.
std::vector<GroundAction> parse_trace(std::string_view text);

/// A formula in the theory syntax, resolved against `theory`. Free
/// variables must be declared in `scope`; suppressed fluents are accepted
/// when `allow_suppressed` is set.
Formula parse_formula(std::string_view text, const Theory& theory, const std::vector<Param>& scope = {},
                      bool allow_suppressed = false);

}  // namespace oblicalc
