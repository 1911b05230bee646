#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oblicalc/terms.hpp"

namespace oblicalc {

/// Situation comparison used in bounded quantifiers: ⊏, = or ⊑.
enum class SitRel : std::uint8_t { Less, Equal, LessEq };

std::string_view sit_rel_symbol(SitRel rel);

/// Header of a situation-bounded quantifier
///   (∃s). lower ∼ middle ∼ upper ∧ W   /   (∀s). lower ∼ middle ∼ upper ⊃ W
/// where `middle` is rooted at the bound variable. A missing lower bound is
/// the shorthand form with lower = S0.
struct SituationBound {
  Term var;
  std::optional<Term> lower;
  SitRel lower_rel = SitRel::LessEq;
  Term middle;
  SitRel upper_rel = SitRel::LessEq;
  Term upper;

  bool operator==(const SituationBound&) const = default;
};

/// Immutable formula tree.
class Formula {
 public:
  enum class Kind : std::uint8_t {
    True,
    False,
    Fluent,  // relational fluent; situation argument may be suppressed
    Rigid,   // situation-independent predicate
    Poss,    // Poss(a, s)
    Equal,
    Less,       // time <
    LessEq,     // time <=
    SitLess,    // ⊏
    SitLessEq,  // ⊑
    Not,
    And,
    Or,
    Implies,
    Iff,
    Exists,
    Forall,
    BoundedExists,
    BoundedForall,
  };

  Formula() = default;

  static Formula truth(bool value);
  static Formula fluent(std::string name, std::vector<Term> args, std::optional<Term> situation);
  static Formula rigid(std::string name, std::vector<Term> args);
  static Formula poss(Term action, Term situation);
  static Formula compare(Kind kind, Term lhs, Term rhs);
  static Formula equal(Term lhs, Term rhs) { return compare(Kind::Equal, std::move(lhs), std::move(rhs)); }
  static Formula negate(Formula f);
  static Formula binary(Kind kind, Formula lhs, Formula rhs);
  static Formula conj(Formula lhs, Formula rhs) { return binary(Kind::And, std::move(lhs), std::move(rhs)); }
  static Formula disj(Formula lhs, Formula rhs) { return binary(Kind::Or, std::move(lhs), std::move(rhs)); }
  static Formula quantified(Kind kind, std::vector<Term> vars, Formula body);
  static Formula bounded(Kind kind, SituationBound bound, Formula body);

  bool valid() const { return node_ != nullptr; }
  Kind kind() const;
  const std::string& name() const;
  /// Atom arguments (fluent/rigid: object args; Poss and comparisons: both sides).
  std::span<const Term> terms() const;
  const std::optional<Term>& situation() const;
  std::span<const Formula> children() const;
  std::span<const Term> vars() const;
  const SituationBound& bound() const;

  bool is_atom() const;
  bool is_ground() const;

  bool operator==(const Formula& other) const;
  bool operator<(const Formula& other) const { return str() < other.str(); }

  /// Concrete syntax accepted by the theory parser.
  std::string str() const;

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Replaces free variables by terms (capture is not possible: substituted
/// terms are ground in every use inside the library).
Term substitute(const Term& t, const std::map<std::string, Term>& subst);
Formula substitute(const Formula& f, const std::map<std::string, Term>& subst);

/// True iff every fluent atom and functional-fluent term in `f` has its
/// situation argument suppressed and `f` has no situation quantifiers.
bool is_situation_suppressed(const Formula& f);

/// φ[σ]: adds σ as the situation argument of every suppressed fluent.
Formula restore(const Formula& suppressed, const Term& sigma);

/// Inverse of restore: drops situation arguments equal to `sigma`.
/// Throws ContractError if some fluent carries a different situation.
Formula suppress(const Formula& f, const Term& sigma);

/// Matches a suppressed pattern with variables against a ground suppressed
/// formula; binds pattern variables to constants.
std::optional<std::map<std::string, Term>> match(const Formula& pattern, const Formula& ground);

void collect_situation_terms(const Formula& f, std::vector<Term>& out);
bool mentions_poss(const Formula& f);

enum class BoundClass : std::uint8_t { Unbounded, Bounded, StrictlyBounded };
std::string_view bound_class_name(BoundClass c);

/// Tightest class of `w` with respect to `sigma`, a situation term rooted at
/// S0 or at a situation variable.
BoundClass classify_bounded(const Formula& w, const Term& sigma);

}  // namespace oblicalc
