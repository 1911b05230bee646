#include "oblicalc/formula.hpp"

#include <sstream>

namespace oblicalc {

std::string_view sit_rel_symbol(SitRel rel) {
  switch (rel) {
    case SitRel::Less: return "<<";
    case SitRel::Equal: return "==";
    case SitRel::LessEq: return "<<=";
  }
  return "?";
}

struct Formula::Node {
  Kind kind;
  std::string name;
  std::vector<Term> terms;
  std::optional<Term> situation;
  std::vector<Formula> children;
  std::vector<Term> vars;
  std::optional<SituationBound> bound;
};

Formula Formula::truth(bool value) {
  static const Formula t(std::make_shared<const Node>(Node{Kind::True, "true", {}, {}, {}, {}, {}}));
  static const Formula f(std::make_shared<const Node>(Node{Kind::False, "false", {}, {}, {}, {}, {}}));
  return value ? t : f;
}

Formula Formula::fluent(std::string name, std::vector<Term> args, std::optional<Term> situation) {
  if (situation && situation->sort() != Sort::Situation)
    throw SortError("situation argument of " + name + " is " + situation->str());
  return Formula(std::make_shared<const Node>(
      Node{Kind::Fluent, std::move(name), std::move(args), std::move(situation), {}, {}, {}}));
}

Formula Formula::rigid(std::string name, std::vector<Term> args) {
  for (const auto& a : args)
    if (a.sort() == Sort::Situation) throw SortError("rigid predicate " + name + " takes no situation");
  return Formula(std::make_shared<const Node>(Node{Kind::Rigid, std::move(name), std::move(args), {}, {}, {}, {}}));
}

Formula Formula::poss(Term action, Term situation) {
  if (action.sort() != Sort::Action || situation.sort() != Sort::Situation)
    throw SortError("Poss expects (action, situation)");
  return Formula(std::make_shared<const Node>(
      Node{Kind::Poss, "Poss", {std::move(action), std::move(situation)}, {}, {}, {}, {}}));
}

Formula Formula::compare(Kind kind, Term lhs, Term rhs) {
  switch (kind) {
    case Kind::Equal:
      if (lhs.sort() != rhs.sort())
        throw SortError("cannot equate " + lhs.str() + " and " + rhs.str() + " of different sorts");
      break;
    case Kind::Less:
    case Kind::LessEq:
      if (lhs.sort() != Sort::Time || rhs.sort() != Sort::Time)
        throw SortError("< and <= compare time terms only");
      break;
    case Kind::SitLess:
    case Kind::SitLessEq:
      if (lhs.sort() != Sort::Situation || rhs.sort() != Sort::Situation)
        throw SortError("<< and <<= compare situation terms only");
      break;
    default: throw ContractError("not a comparison kind");
  }
  return Formula(std::make_shared<const Node>(Node{kind, "", {std::move(lhs), std::move(rhs)}, {}, {}, {}, {}}));
}

Formula Formula::negate(Formula f) {
  return Formula(std::make_shared<const Node>(Node{Kind::Not, "not", {}, {}, {std::move(f)}, {}, {}}));
}

Formula Formula::binary(Kind kind, Formula lhs, Formula rhs) {
  if (kind != Kind::And && kind != Kind::Or && kind != Kind::Implies && kind != Kind::Iff)
    throw ContractError("not a binary connective");
  return Formula(std::make_shared<const Node>(Node{kind, "", {}, {}, {std::move(lhs), std::move(rhs)}, {}, {}}));
}

Formula Formula::quantified(Kind kind, std::vector<Term> vars, Formula body) {
  if (kind != Kind::Exists && kind != Kind::Forall) throw ContractError("not a quantifier kind");
  for (const auto& v : vars)
    if (v.kind() != Term::Kind::Variable) throw SortError("quantified term " + v.str() + " is not a variable");
  return Formula(std::make_shared<const Node>(Node{kind, "", {}, {}, {std::move(body)}, std::move(vars), {}}));
}

Formula Formula::bounded(Kind kind, SituationBound bound, Formula body) {
  if (kind != Kind::BoundedExists && kind != Kind::BoundedForall) throw ContractError("not a bounded quantifier kind");
  if (bound.var.kind() != Term::Kind::Variable || bound.var.sort() != Sort::Situation)
    throw SortError("bounded quantifier must bind a situation variable");
  for (const Term* t : {&bound.middle, &bound.upper})
    if (t->sort() != Sort::Situation) throw SortError("bounded quantifier header needs situation terms");
  if (bound.lower && bound.lower->sort() != Sort::Situation)
    throw SortError("bounded quantifier header needs situation terms");
  return Formula(std::make_shared<const Node>(Node{kind, "", {}, {}, {std::move(body)}, {}, std::move(bound)}));
}

Formula::Kind Formula::kind() const { return node_->kind; }
const std::string& Formula::name() const { return node_->name; }
std::span<const Term> Formula::terms() const { return node_->terms; }
const std::optional<Term>& Formula::situation() const { return node_->situation; }
std::span<const Formula> Formula::children() const { return node_->children; }
std::span<const Term> Formula::vars() const { return node_->vars; }
const SituationBound& Formula::bound() const { return *node_->bound; }

bool Formula::is_atom() const {
  switch (kind()) {
    case Kind::True:
    case Kind::False:
    case Kind::Fluent:
    case Kind::Rigid:
    case Kind::Poss:
    case Kind::Equal:
    case Kind::Less:
    case Kind::LessEq:
    case Kind::SitLess:
    case Kind::SitLessEq: return true;
    default: return false;
  }
}

bool Formula::is_ground() const {
  if (!vars().empty() || kind() == Kind::BoundedExists || kind() == Kind::BoundedForall) return false;
  for (const auto& t : terms())
    if (!t.is_ground()) return false;
  if (situation() && !situation()->is_ground()) return false;
  for (const auto& c : children())
    if (!c.is_ground()) return false;
  return true;
}

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  if (!node_ || !other.node_) return false;
  const Node& a = *node_;
  const Node& b = *other.node_;
  return a.kind == b.kind && a.name == b.name && a.terms == b.terms && a.situation == b.situation &&
         a.children == b.children && a.vars == b.vars && a.bound == b.bound;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::Iff: return 1;
    case Formula::Kind::Implies: return 2;
    case Formula::Kind::Or: return 3;
    case Formula::Kind::And: return 4;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
    case Formula::Kind::BoundedExists:
    case Formula::Kind::BoundedForall: return 0;
    default: return 10;
  }
}

std::string_view binary_word(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::And: return "and";
    case Formula::Kind::Or: return "or";
    case Formula::Kind::Implies: return "implies";
    case Formula::Kind::Iff: return "iff";
    default: return "?";
  }
}

std::string_view compare_symbol(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::Equal: return "==";
    case Formula::Kind::Less: return "<";
    case Formula::Kind::LessEq: return "<=";
    case Formula::Kind::SitLess: return "<<";
    case Formula::Kind::SitLessEq: return "<<=";
    default: return "?";
  }
}

void print(const Formula& f, std::ostream& out);

// Children whose operator binds no tighter than the parent are parenthesized.
void print_child(const Formula& child, int parent_prec, std::ostream& out) {
  if (precedence(child.kind()) <= parent_prec) {
    out << "(";
    print(child, out);
    out << ")";
  } else {
    print(child, out);
  }
}

void print_atom_args(std::span<const Term> args, const std::optional<Term>& situation, std::ostream& out) {
  out << "(";
  for (std::size_t i = 0; i < args.size(); ++i) out << (i ? ", " : "") << args[i].str();
  if (situation) out << (args.empty() ? "" : ", ") << situation->str();
  out << ")";
}

void print(const Formula& f, std::ostream& out) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True: out << "true"; break;
    case K::False: out << "false"; break;
    case K::Fluent:
      out << f.name();
      print_atom_args(f.terms(), f.situation(), out);
      break;
    case K::Rigid:
      out << f.name();
      print_atom_args(f.terms(), std::nullopt, out);
      break;
    case K::Poss: out << "Poss(" << f.terms()[0].str() << ", " << f.terms()[1].str() << ")"; break;
    case K::Equal:
    case K::Less:
    case K::LessEq:
    case K::SitLess:
    case K::SitLessEq:
      out << f.terms()[0].str() << " " << compare_symbol(f.kind()) << " " << f.terms()[1].str();
      break;
    case K::Not:
      out << "not ";
      print_child(f.children()[0], 9, out);
      break;
    case K::And:
    case K::Or:
    case K::Implies:
    case K::Iff: {
      const int p = precedence(f.kind());
      print_child(f.children()[0], p, out);
      out << " " << binary_word(f.kind()) << " ";
      print_child(f.children()[1], p, out);
      break;
    }
    case K::Exists:
    case K::Forall: {
      out << (f.kind() == K::Exists ? "exists " : "forall ");
      const auto vars = f.vars();
      for (std::size_t i = 0; i < vars.size(); ++i)
        out << (i ? ", " : "") << vars[i].name() << ": " << sort_name(vars[i].sort());
      out << ". ";
      print(f.children()[0], out);
      break;
    }
    case K::BoundedExists:
    case K::BoundedForall: {
      const auto& b = f.bound();
      out << (f.kind() == K::BoundedExists ? "exists " : "forall ") << b.var.name() << ": ";
      if (b.lower) out << b.lower->str() << " " << sit_rel_symbol(b.lower_rel) << " ";
      out << b.middle.str() << " " << sit_rel_symbol(b.upper_rel) << " " << b.upper.str() << ". ";
      print(f.children()[0], out);
      break;
    }
  }
}

}  // namespace

std::string Formula::str() const {
  if (!node_) return "<invalid>";
  std::ostringstream out;
  print(*this, out);
  return out.str();
}

// ---------------------------------------------------------------------------
// Substitution, suppression, matching

Term substitute(const Term& t, const std::map<std::string, Term>& subst) {
  using K = Term::Kind;
  switch (t.kind()) {
    case K::Variable: {
      auto it = subst.find(t.name());
      return it == subst.end() ? t : it->second;
    }
    case K::Constant:
    case K::Number:
    case K::Initial: return t;
    default: break;
  }
  std::vector<Term> args;
  for (const auto& a : t.args()) args.push_back(substitute(a, subst));
  switch (t.kind()) {
    case K::Action: return Term::action(t.name(), std::move(args));
    case K::Do: return Term::do_(args[0], args[1]);
    case K::Start: return Term::start(args[0]);
    case K::TimeOf: return Term::time_of(args[0]);
    case K::Plus: return Term::plus(args[0], args[1]);
    case K::Function: {
      std::optional<Term> s;
      if (t.situation()) s = substitute(*t.situation(), subst);
      return Term::function(t.name(), std::move(args), std::move(s));
    }
    default: return t;
  }
}

namespace {

std::vector<Term> map_all(std::span<const Term> ts, const auto& fn) {
  std::vector<Term> out;
  out.reserve(ts.size());
  for (const auto& t : ts) out.push_back(fn(t));
  return out;
}

}  // namespace

Formula substitute(const Formula& f, const std::map<std::string, Term>& subst) {
  using K = Formula::Kind;
  if (subst.empty()) return f;
  auto sub = [&](const Term& t) { return substitute(t, subst); };
  switch (f.kind()) {
    case K::True:
    case K::False: return f;
    case K::Fluent: {
      std::optional<Term> s;
      if (f.situation()) s = sub(*f.situation());
      return Formula::fluent(f.name(), map_all(f.terms(), sub), std::move(s));
    }
    case K::Rigid: return Formula::rigid(f.name(), map_all(f.terms(), sub));
    case K::Poss: return Formula::poss(sub(f.terms()[0]), sub(f.terms()[1]));
    case K::Equal:
    case K::Less:
    case K::LessEq:
    case K::SitLess:
    case K::SitLessEq: return Formula::compare(f.kind(), sub(f.terms()[0]), sub(f.terms()[1]));
    case K::Not: return Formula::negate(substitute(f.children()[0], subst));
    case K::And:
    case K::Or:
    case K::Implies:
    case K::Iff:
      return Formula::binary(f.kind(), substitute(f.children()[0], subst), substitute(f.children()[1], subst));
    case K::Exists:
    case K::Forall: {
      auto inner = subst;
      for (const auto& v : f.vars()) inner.erase(v.name());
      return Formula::quantified(f.kind(), {f.vars().begin(), f.vars().end()}, substitute(f.children()[0], inner));
    }
    case K::BoundedExists:
    case K::BoundedForall: {
      SituationBound b = f.bound();
      if (b.lower) b.lower = sub(*b.lower);
      b.upper = sub(b.upper);
      auto inner = subst;
      inner.erase(b.var.name());
      b.middle = substitute(b.middle, inner);
      return Formula::bounded(f.kind(), std::move(b), substitute(f.children()[0], inner));
    }
  }
  return f;
}

namespace {

bool term_suppressed(const Term& t) {
  if (t.kind() == Term::Kind::Function && t.situation()) return false;
  if (t.sort() == Sort::Situation) return false;
  for (const auto& a : t.args())
    if (!term_suppressed(a)) return false;
  return true;
}

Term restore_term(const Term& t, const Term& sigma) {
  if (t.kind() == Term::Kind::Function) {
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(restore_term(a, sigma));
    return Term::function(t.name(), std::move(args), t.situation() ? t.situation() : std::optional<Term>(sigma));
  }
  if (t.kind() == Term::Kind::Action) {
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(restore_term(a, sigma));
    return Term::action(t.name(), std::move(args));
  }
  if (t.kind() == Term::Kind::Plus) return Term::plus(restore_term(t.args()[0], sigma), restore_term(t.args()[1], sigma));
  return t;
}

Term suppress_term(const Term& t, const Term& sigma) {
  if (t.kind() == Term::Kind::Function) {
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(suppress_term(a, sigma));
    if (t.situation() && *t.situation() != sigma)
      throw ContractError("cannot suppress " + t.str() + ": its situation is not " + sigma.str());
    return Term::function(t.name(), std::move(args), std::nullopt);
  }
  if (t.kind() == Term::Kind::Action) {
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(suppress_term(a, sigma));
    return Term::action(t.name(), std::move(args));
  }
  if (t.kind() == Term::Kind::Plus) return Term::plus(suppress_term(t.args()[0], sigma), suppress_term(t.args()[1], sigma));
  if (t.sort() == Sort::Situation || t.kind() == Term::Kind::Start)
    throw ContractError("cannot suppress situation term " + t.str());
  return t;
}

template <typename TermFn, typename FluentFn>
Formula rebuild(const Formula& f, const TermFn& term_fn, const FluentFn& fluent_fn) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True:
    case K::False: return f;
    case K::Fluent: return fluent_fn(f);
    case K::Rigid: return Formula::rigid(f.name(), map_all(f.terms(), term_fn));
    case K::Poss:
    case K::SitLess:
    case K::SitLessEq: throw ContractError("situation-suppressed formulas cannot mention " + f.str());
    case K::Equal:
    case K::Less:
    case K::LessEq: return Formula::compare(f.kind(), term_fn(f.terms()[0]), term_fn(f.terms()[1]));
    case K::Not: return Formula::negate(rebuild(f.children()[0], term_fn, fluent_fn));
    case K::And:
    case K::Or:
    case K::Implies:
    case K::Iff:
      return Formula::binary(f.kind(), rebuild(f.children()[0], term_fn, fluent_fn),
                             rebuild(f.children()[1], term_fn, fluent_fn));
    case K::Exists:
    case K::Forall:
      for (const auto& v : f.vars())
        if (v.sort() == Sort::Situation) throw ContractError("situation-suppressed formulas cannot quantify situations");
      return Formula::quantified(f.kind(), {f.vars().begin(), f.vars().end()},
                                 rebuild(f.children()[0], term_fn, fluent_fn));
    case K::BoundedExists:
    case K::BoundedForall: throw ContractError("situation-suppressed formulas cannot quantify situations");
  }
  return f;
}

}  // namespace

bool is_situation_suppressed(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True:
    case K::False: return true;
    case K::Fluent:
      if (f.situation()) return false;
      [[fallthrough]];
    case K::Rigid:
    case K::Equal:
    case K::Less:
    case K::LessEq:
      for (const auto& t : f.terms())
        if (!term_suppressed(t)) return false;
      return true;
    case K::Poss:
    case K::SitLess:
    case K::SitLessEq:
    case K::BoundedExists:
    case K::BoundedForall: return false;
    case K::Exists:
    case K::Forall:
      for (const auto& v : f.vars())
        if (v.sort() == Sort::Situation) return false;
      return is_situation_suppressed(f.children()[0]);
    default:
      for (const auto& c : f.children())
        if (!is_situation_suppressed(c)) return false;
      return true;
  }
}

Formula restore(const Formula& suppressed, const Term& sigma) {
  if (sigma.sort() != Sort::Situation) throw SortError("restore needs a situation term");
  auto term_fn = [&](const Term& t) { return restore_term(t, sigma); };
  return rebuild(suppressed, term_fn, [&](const Formula& fl) {
    if (fl.situation()) throw ContractError("fluent " + fl.str() + " already has a situation argument");
    return Formula::fluent(fl.name(), map_all(fl.terms(), term_fn), sigma);
  });
}

Formula suppress(const Formula& f, const Term& sigma) {
  auto term_fn = [&](const Term& t) { return suppress_term(t, sigma); };
  return rebuild(f, term_fn, [&](const Formula& fl) {
    if (!fl.situation() || *fl.situation() != sigma)
      throw ContractError("cannot suppress " + fl.str() + ": its situation is not " + sigma.str());
    return Formula::fluent(fl.name(), map_all(fl.terms(), term_fn), std::nullopt);
  });
}

namespace {

bool match_term(const Term& pattern, const Term& ground, std::map<std::string, Term>& binding) {
  if (pattern.kind() == Term::Kind::Variable) {
    if (pattern.sort() != ground.sort()) return false;
    auto [it, inserted] = binding.emplace(pattern.name(), ground);
    return inserted || it->second == ground;
  }
  if (pattern.kind() != ground.kind() || pattern.name() != ground.name() || pattern.args().size() != ground.args().size())
    return false;
  if (pattern.kind() == Term::Kind::Number) return pattern.number_value() == ground.number_value();
  for (std::size_t i = 0; i < pattern.args().size(); ++i)
    if (!match_term(pattern.args()[i], ground.args()[i], binding)) return false;
  if (pattern.situation().has_value() != ground.situation().has_value()) return false;
  return !pattern.situation() || match_term(*pattern.situation(), *ground.situation(), binding);
}

bool match_formula(const Formula& p, const Formula& g, std::map<std::string, Term>& binding) {
  if (p.kind() != g.kind() || p.name() != g.name() || p.terms().size() != g.terms().size() ||
      p.children().size() != g.children().size() || p.situation().has_value() != g.situation().has_value())
    return false;
  if (p.vars().size() || g.vars().size() || p.kind() == Formula::Kind::BoundedExists ||
      p.kind() == Formula::Kind::BoundedForall)
    return p == g;
  for (std::size_t i = 0; i < p.terms().size(); ++i)
    if (!match_term(p.terms()[i], g.terms()[i], binding)) return false;
  if (p.situation() && !match_term(*p.situation(), *g.situation(), binding)) return false;
  for (std::size_t i = 0; i < p.children().size(); ++i)
    if (!match_formula(p.children()[i], g.children()[i], binding)) return false;
  return true;
}

}  // namespace

std::optional<std::map<std::string, Term>> match(const Formula& pattern, const Formula& ground) {
  std::map<std::string, Term> binding;
  if (!match_formula(pattern, ground, binding)) return std::nullopt;
  return binding;
}

void collect_situation_terms(const Formula& f, std::vector<Term>& out) {
  for (const auto& t : f.terms()) collect_situation_terms(t, out);
  if (f.situation()) collect_situation_terms(*f.situation(), out);
  if (f.kind() == Formula::Kind::BoundedExists || f.kind() == Formula::Kind::BoundedForall) {
    const auto& b = f.bound();
    if (b.lower) collect_situation_terms(*b.lower, out);
    collect_situation_terms(b.middle, out);
    collect_situation_terms(b.upper, out);
  }
  for (const auto& c : f.children()) collect_situation_terms(c, out);
}

bool mentions_poss(const Formula& f) {
  if (f.kind() == Formula::Kind::Poss) return true;
  for (const auto& c : f.children())
    if (mentions_poss(c)) return true;
  return false;
}

}  // namespace oblicalc
