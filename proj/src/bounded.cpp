// Bounded and strictly bounded formulas over a situation term σ rooted at λ.
//
// bounded(W, σ):
//   atom          every situation term of W is rooted at λ
//   ¬, ∧, ∨, ...  every operand bounded by some term rooted at λ
//   ∃v / ∀v       v of sort object/action/time, body bounded by a term rooted at λ
//   bounded ∃s/∀s upper bound σ itself, middle rooted at s, and the body is
//                 (¬)(W' ∧ W'') with W' bounded by a term rooted at s and W''
//                 by a term rooted at λ
//
// strictly(W, σ) replaces "rooted at λ" by "subterm of σ" and bounds W' by a
// subterm of the middle term. The W' ∧ W'' split is taken modulo
// associativity and commutativity of ∧: every top-level conjunct must fall
// on one side.

#include <algorithm>

#include "oblicalc/formula.hpp"

namespace oblicalc {

std::string_view bound_class_name(BoundClass c) {
  switch (c) {
    case BoundClass::Unbounded: return "unbounded";
    case BoundClass::Bounded: return "bounded";
    case BoundClass::StrictlyBounded: return "strictly_bounded";
  }
  return "?";
}

namespace {

using K = Formula::Kind;

std::vector<Term> atom_situation_terms(const Formula& atom) {
  std::vector<Term> out;
  for (const auto& t : atom.terms()) collect_situation_terms(t, out);
  if (atom.situation()) collect_situation_terms(*atom.situation(), out);
  return out;
}

void flatten_conjuncts(const Formula& w, std::vector<Formula>& out) {
  if (w.kind() == K::And) {
    flatten_conjuncts(w.children()[0], out);
    flatten_conjuncts(w.children()[1], out);
  } else {
    out.push_back(w);
  }
}

std::vector<Formula> body_conjuncts(const Formula& body) {
  const Formula& core = body.kind() == K::Not ? body.children()[0] : body;
  std::vector<Formula> out;
  flatten_conjuncts(core, out);
  return out;
}

bool quantifies_situation(const Formula& w) {
  return std::any_of(w.vars().begin(), w.vars().end(), [](const Term& v) { return v.sort() == Sort::Situation; });
}

// `sigma` is the exact bound when `exact`, otherwise any term rooted at `root`.
bool bounded_by_root(const Formula& w, const Term& sigma, const Term& root, bool exact) {
  if (w.is_atom()) {
    const auto terms = atom_situation_terms(w);
    return std::all_of(terms.begin(), terms.end(), [&](const Term& t) { return rooted_at(t, root); });
  }
  switch (w.kind()) {
    case K::Exists:
    case K::Forall: return !quantifies_situation(w) && bounded_by_root(w.children()[0], sigma, root, false);
    case K::BoundedExists:
    case K::BoundedForall: {
      const auto& b = w.bound();
      if (!rooted_at(b.middle, b.var)) return false;
      if (exact ? b.upper != sigma : !rooted_at(b.upper, root)) return false;
      for (const auto& c : body_conjuncts(w.children()[0]))
        if (!bounded_by_root(c, b.middle, b.var, false) && !bounded_by_root(c, sigma, root, false)) return false;
      return true;
    }
    default:
      return std::all_of(w.children().begin(), w.children().end(),
                         [&](const Formula& c) { return bounded_by_root(c, sigma, root, false); });
  }
}

bool is_subterm(const Term& t, const std::vector<Term>& subterms) {
  return std::find(subterms.begin(), subterms.end(), t) != subterms.end();
}

// `sigma` is the exact bound when `exact`, otherwise any of its subterms.
bool strictly_bounded(const Formula& w, const Term& sigma, bool exact) {
  std::vector<Term> subterms;
  collect_situation_terms(sigma, subterms);
  if (w.is_atom()) {
    const auto terms = atom_situation_terms(w);
    return std::all_of(terms.begin(), terms.end(), [&](const Term& t) { return is_subterm(t, subterms); });
  }
  switch (w.kind()) {
    case K::Exists:
    case K::Forall: return !quantifies_situation(w) && strictly_bounded(w.children()[0], sigma, false);
    case K::BoundedExists:
    case K::BoundedForall: {
      const auto& b = w.bound();
      if (!rooted_at(b.middle, b.var)) return false;
      if (exact ? b.upper != sigma : !is_subterm(b.upper, subterms)) return false;
      for (const auto& c : body_conjuncts(w.children()[0]))
        if (!strictly_bounded(c, b.middle, false) && !strictly_bounded(c, sigma, false)) return false;
      return true;
    }
    default:
      return std::all_of(w.children().begin(), w.children().end(),
                         [&](const Formula& c) { return strictly_bounded(c, sigma, false); });
  }
}

}  // namespace

BoundClass classify_bounded(const Formula& w, const Term& sigma) {
  if (!sigma.valid() || sigma.sort() != Sort::Situation) throw SortError("classify_bounded needs a situation term");
  const Term root = situation_root(sigma);
  if (!rooted_at(sigma, root)) throw ContractError(sigma.str() + " is not rooted at S0 or a situation variable");
  if (strictly_bounded(w, sigma, true)) return BoundClass::StrictlyBounded;
  if (bounded_by_root(w, sigma, root, true)) return BoundClass::Bounded;
  return BoundClass::Unbounded;
}

}  // namespace oblicalc
