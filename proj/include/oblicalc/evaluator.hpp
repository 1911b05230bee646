#pragma once

// Ground query evaluation. Fluents are answered by unfolding successor state
// axioms backwards to S0; bounded situation quantifiers range over the
// prefixes of their upper bound.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "oblicalc/theory.hpp"

namespace oblicalc {

/// A ground action sequence over a theory, with every prefix situation.
class Trace {
 public:
  Trace(std::shared_ptr<const Theory> theory, std::vector<GroundAction> actions);
  Trace(const Theory& theory, std::vector<GroundAction> actions)
      : Trace(std::make_shared<const Theory>(theory), std::move(actions)) {}

  const Theory& theory() const { return *theory_; }
  const std::shared_ptr<const Theory>& theory_ptr() const { return theory_; }
  const std::vector<GroundAction>& actions() const { return actions_; }
  std::size_t size() const { return actions_.size(); }

  /// Prefix with k actions, 0 ≤ k ≤ size().
  const Situation& prefix(std::size_t k) const;
  const std::vector<Situation>& prefixes() const { return prefixes_; }
  const Situation& last() const { return prefixes_.back(); }
  std::optional<std::size_t> index_of(const Situation& s) const;

  /// Object constants of the theory and the trace, sorted.
  std::vector<std::string> universe() const;

 private:
  std::shared_ptr<const Theory> theory_;
  std::vector<GroundAction> actions_;
  std::vector<Situation> prefixes_;
};

/// Value of a ground term.
using Value = std::variant<std::string, GroundAction, TimePoint, Situation>;
using Bindings = std::map<std::string, Value>;

std::string value_str(const Value& v);

class Evaluator {
 public:
  /// `constants` extend the theory's own object symbols in quantifier ranges.
  explicit Evaluator(std::shared_ptr<const Theory> theory, std::vector<std::string> constants = {});
  explicit Evaluator(const Trace& trace) : Evaluator(trace.theory_ptr(), trace.universe()) {}
  virtual ~Evaluator() = default;

  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  const Theory& theory() const { return *theory_; }

  bool eval_fluent(const GroundAtom& atom, const Situation& s) const;
  /// Value of a functional fluent.
  std::string eval_function(const GroundAtom& f, const Situation& s) const;
  bool eval_poss(const GroundAction& a, const Situation& s) const;
  /// Truth of `w` with free variables taken from `env`.
  bool eval_formula(const Formula& w, const Bindings& env = {}) const;
  /// φ[s] for a situation-suppressed φ with no free variables.
  bool holds(const Formula& suppressed, const Situation& s) const;

  Value eval_term(const Term& t, const Bindings& env) const;

  /// Object quantifier range.
  const std::vector<std::string>& universe() const { return universe_; }

  void clear_cache() const;

 protected:
  /// Relational fluent truth; the default unfolds the SSA with memoization.
  virtual bool fluent_value(const GroundAtom& atom, const Situation& s) const;
  /// Functional fluent value; the default unfolds the SSA with memoization.
  virtual std::string function_value(const GroundAtom& f, const Situation& s) const;

  /// One SSA step: the body of `decl` at do(a, prev) for `args` (and `value`).
  bool ssa_body(const FluentDecl& decl, const std::vector<std::string>& args, const Situation& s,
                const std::optional<std::string>& value) const;
  bool initially(const GroundAtom& atom) const;
  std::string initial_value(const GroundAtom& f) const;
  /// The first value accepted by the SSA of functional fluent `decl` at s.
  std::string ssa_function(const FluentDecl& decl, const GroundAtom& f, const Situation& s) const;

  const FluentDecl& fluent_decl(const std::string& name, bool functional) const;

 private:
  bool eval(const Formula& w, Bindings& env) const;
  bool eval_quantifier(const Formula& w, Bindings& env) const;
  bool eval_bounded(const Formula& w, Bindings& env) const;
  std::vector<Value> domain(const Term& var, const Formula& body, const Bindings& env) const;

  std::shared_ptr<const Theory> theory_;
  std::vector<std::string> universe_;
  std::vector<TimePoint> theory_times_;

  using Key = std::pair<std::string, const void*>;
  mutable std::mutex mutex_;
  mutable std::map<Key, std::pair<Situation, bool>> fluent_memo_;
  mutable std::map<Key, std::pair<Situation, std::string>> function_memo_;
};

/// Forward state progression over the prefixes of one trace: the state at
/// prefix k+1 is computed from the tables of prefixes 0..k by evaluating each
/// SSA body once per ground fluent atom.
class Progression : public Evaluator {
 public:
  explicit Progression(const Trace& trace);

  const std::set<GroundAtom>& true_atoms(std::size_t k) const { return states_.at(k); }

 protected:
  bool fluent_value(const GroundAtom& atom, const Situation& s) const override;
  std::string function_value(const GroundAtom& f, const Situation& s) const override;

 private:
  std::size_t index(const Situation& s) const;

  const Trace& trace_;
  std::vector<std::set<GroundAtom>> states_;
  std::vector<std::map<GroundAtom, std::string>> functions_;
};

/// A detected violation with a compensation pending from `detected_at`
/// (a prefix index) until `resolved_at`.
struct CompensationBlock {
  std::size_t detected_at = 0;
  TimePoint enabling_time;
  std::optional<std::size_t> resolved_at;
};

struct ExecutabilityReport {
  bool executable = true;
  /// 1-based positions of the offending actions.
  std::optional<std::size_t> impossible;
  std::optional<std::size_t> time_regression;
  std::optional<std::size_t> blocked;
  std::string reason;
};

/// Every action possible when executed, times non-decreasing, and no ordinary
/// action at or after the enabling time of an unresolved compensation.
ExecutabilityReport executable_detail(const Evaluator& ev, const Situation& s,
                                      std::span<const CompensationBlock> blocks = {});
bool executable(const Evaluator& ev, const Situation& s, std::span<const CompensationBlock> blocks = {});

}  // namespace oblicalc
