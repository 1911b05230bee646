#include "oblicalc/theory.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace oblicalc {

std::string_view obligation_type_name(ObligationType t) {
  switch (t) {
    case ObligationType::Punctual: return "punctual";
    case ObligationType::AchievementPreemptive: return "achievement preemptive";
    case ObligationType::AchievementNonpreemptive: return "achievement nonpreemptive";
    case ObligationType::Maintenance: return "maintenance";
    case ObligationType::Perdurant: return "perdurant";
  }
  return "?";
}

bool is_achievement(ObligationType t) {
  return t == ObligationType::AchievementPreemptive || t == ObligationType::AchievementNonpreemptive;
}

const ActionDecl* Theory::find_action(std::string_view name) const {
  for (const auto& a : actions)
    if (a.sig.name == name) return &a;
  return nullptr;
}

const FluentDecl* Theory::find_fluent(std::string_view name) const {
  for (const auto& f : fluents)
    if (f.name == name) return &f;
  return nullptr;
}

bool Theory::is_rigid_predicate(std::string_view name) const {
  return !find_fluent(name) && !find_action(name) && name != "Poss";
}

void Theory::check_action(const GroundAction& a) const {
  const ActionDecl* decl = find_action(a.functor);
  if (!decl) throw EvalError("undeclared action " + a.functor);
  decl->sig.check(a);
}

namespace {

void term_symbols(const Term& t, std::set<std::string>& constants, std::set<TimePoint>& times) {
  if (t.kind() == Term::Kind::Constant) constants.insert(t.name());
  if (t.kind() == Term::Kind::Number) times.insert(t.number_value());
  for (const auto& a : t.args()) term_symbols(a, constants, times);
  if (t.situation()) term_symbols(*t.situation(), constants, times);
}

void formula_symbols(const Formula& f, std::set<std::string>& constants, std::set<TimePoint>& times) {
  for (const auto& t : f.terms()) term_symbols(t, constants, times);
  if (f.situation()) term_symbols(*f.situation(), constants, times);
  if (f.kind() == Formula::Kind::BoundedExists || f.kind() == Formula::Kind::BoundedForall) {
    const auto& b = f.bound();
    if (b.lower) term_symbols(*b.lower, constants, times);
    term_symbols(b.middle, constants, times);
    term_symbols(b.upper, constants, times);
  }
  for (const auto& c : f.children()) formula_symbols(c, constants, times);
}

void theory_symbols(const Theory& th, std::set<std::string>& constants, std::set<TimePoint>& times) {
  for (const auto& a : th.actions)
    if (a.precondition) formula_symbols(*a.precondition, constants, times);
  for (const auto& f : th.fluents)
    if (f.ssa) formula_symbols(*f.ssa, constants, times);
  for (const auto* atoms : {&th.rigids, &th.init})
    for (const auto& atom : *atoms) constants.insert(atom.args.begin(), atom.args.end());
  for (const auto& [atom, value] : th.init_functions) {
    constants.insert(atom.args.begin(), atom.args.end());
    constants.insert(value);
  }
  for (const auto& o : th.obligations) formula_symbols(o.obliged, constants, times);
  for (const auto& c : th.compensations) {
    formula_symbols(c.pattern, constants, times);
    for (const auto& f : c.compensations) formula_symbols(f, constants, times);
  }
  for (const auto& a : th.alphabet) constants.insert(a.args.begin(), a.args.end());
}

}  // namespace

std::vector<std::string> Theory::constants() const {
  std::set<std::string> constants;
  std::set<TimePoint> times;
  theory_symbols(*this, constants, times);
  return {constants.begin(), constants.end()};
}

std::vector<TimePoint> Theory::time_literals() const {
  std::set<std::string> constants;
  std::set<TimePoint> times{epoch};
  theory_symbols(*this, constants, times);
  return {times.begin(), times.end()};
}

std::vector<Formula> Theory::comp(const Formula& phi) const {
  std::vector<Formula> out;
  for (const auto& rule : compensations) {
    auto binding = match(rule.pattern, phi);
    if (!binding) continue;
    for (const auto& c : rule.compensations) {
      Formula f = substitute(c, *binding);
      if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
    }
  }
  return out;
}

std::optional<TimePoint> Theory::comp_window(const Formula& phi) const {
  for (const auto& rule : compensations)
    if (match(rule.pattern, phi)) return rule.window;
  return std::nullopt;
}

std::vector<ActionSignature> signatures(const Theory& theory) {
  std::vector<ActionSignature> out;
  for (const auto& a : theory.actions) out.push_back(a.sig);
  return out;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void free_variables(const Term& t, std::set<std::string>& bound, std::set<std::string>& out) {
  if (t.kind() == Term::Kind::Variable && !bound.count(t.name())) out.insert(t.name());
  for (const auto& a : t.args()) free_variables(a, bound, out);
  if (t.situation()) free_variables(*t.situation(), bound, out);
}

void free_variables(const Formula& f, std::set<std::string> bound, std::set<std::string>& out) {
  for (const auto& v : f.vars()) bound.insert(v.name());
  if (f.kind() == Formula::Kind::BoundedExists || f.kind() == Formula::Kind::BoundedForall) {
    const auto& b = f.bound();
    if (b.lower) free_variables(*b.lower, bound, out);
    free_variables(b.upper, bound, out);
    bound.insert(b.var.name());
    free_variables(b.middle, bound, out);
  }
  for (const auto& t : f.terms()) free_variables(t, bound, out);
  if (f.situation()) free_variables(*f.situation(), bound, out);
  for (const auto& c : f.children()) free_variables(c, bound, out);
}

bool has_suppressed_fluent(const Term& t) {
  if (t.kind() == Term::Kind::Function && !t.situation()) return true;
  for (const auto& a : t.args())
    if (has_suppressed_fluent(a)) return true;
  return false;
}

bool has_suppressed_fluent(const Formula& f) {
  if (f.kind() == Formula::Kind::Fluent && !f.situation()) return true;
  for (const auto& t : f.terms())
    if (has_suppressed_fluent(t)) return true;
  for (const auto& c : f.children())
    if (has_suppressed_fluent(c)) return true;
  return false;
}

struct Validator {
  const Theory& th;
  std::vector<Diagnostic> out;

  void report(SourceLoc loc, std::string code, std::string message) {
    out.push_back({loc, std::move(code), std::move(message)});
  }

  void check_atom(const GroundAtom& atom, SourceLoc loc, const char* where) {
    const FluentDecl* f = th.find_fluent(atom.name);
    if (std::string_view(where) == "rigid") {
      if (f || th.find_action(atom.name))
        report(loc, "bad-fact", "rigid fact " + atom.str() + " names a fluent or action");
      return;
    }
    if (!f) {
      report(loc, "bad-fact", std::string(where) + " fact " + atom.str() + " names no declared fluent");
    } else if (f->params.size() != atom.args.size()) {
      report(loc, "bad-fact", std::string(where) + " fact " + atom.str() + " has the wrong arity");
    }
  }

  void actions() {
    for (const auto& a : th.actions) {
      const auto& params = a.sig.params;
      if (params.empty() || params.back().sort != Sort::Time)
        report(a.loc, "bad-signature", "action " + a.sig.name + ": last parameter must have sort time");
      for (std::size_t i = 0; i + 1 < params.size(); ++i)
        if (params[i].sort != Sort::Object)
          report(a.loc, "bad-signature", "action " + a.sig.name + ": parameter " + params[i].name + " must have sort object");
      if (!a.precondition) {
        report(a.loc, "missing-apa", "action " + a.sig.name + " has no precondition axiom");
        continue;
      }
      const std::string axiom = "APA of " + a.sig.name;
      if (mentions_poss(*a.precondition)) report(a.poss_loc, "poss-in-apa", axiom + ": Poss in APA body");
      if (has_suppressed_fluent(*a.precondition))
        report(a.poss_loc, "suppressed-situation", axiom + ": every fluent needs a situation argument");
      const auto cls = classify_bounded(*a.precondition, Term::variable("s", Sort::Situation));
      if (cls == BoundClass::Unbounded)
        report(a.poss_loc, "not-bounded", axiom + ": body is not bounded by s");
      std::set<std::string> allowed{"s"};
      for (const auto& p : params) allowed.insert(p.name);
      unbound(*a.precondition, allowed, a.poss_loc, axiom);
    }
  }

  void fluents() {
    for (const auto& f : th.fluents) {
      for (const auto& p : f.params)
        if (p.sort != Sort::Object)
          report(f.loc, "bad-signature", "fluent " + f.name + ": parameter " + p.name + " must have sort object");
      if (!f.ssa) {
        report(f.loc, "missing-ssa", "fluent " + f.name + " has no successor state axiom");
        continue;
      }
      const std::string axiom = "SSA of " + f.name;
      if (mentions_poss(*f.ssa)) report(f.ssa_loc, "poss-in-ssa", axiom + ": Poss in SSA body");
      if (has_suppressed_fluent(*f.ssa))
        report(f.ssa_loc, "suppressed-situation", axiom + ": every fluent needs a situation argument");
      const auto cls = classify_bounded(*f.ssa, Term::variable("s", Sort::Situation));
      if (cls != BoundClass::StrictlyBounded)
        report(f.ssa_loc, "not-strictly-bounded",
               axiom + ": body is not strictly bounded by s (classified " + std::string(bound_class_name(cls)) + ")");
      std::set<std::string> allowed{"a", "s"};
      if (f.functional) allowed.insert(std::string(Theory::kValueVariable));
      for (const auto& p : f.params) allowed.insert(p.name);
      unbound(*f.ssa, allowed, f.ssa_loc, axiom);
    }
  }

  void unbound(const Formula& body, const std::set<std::string>& allowed, SourceLoc loc, const std::string& axiom) {
    std::set<std::string> free;
    free_variables(body, {}, free);
    for (const auto& v : free)
      if (!allowed.count(v)) report(loc, "free-variable", axiom + ": variable " + v + " is not bound");
  }

  void facts() {
    for (const auto& atom : th.rigids) check_atom(atom, {}, "rigid");
    for (const auto& atom : th.init) {
      check_atom(atom, {}, "init");
      if (const auto* f = th.find_fluent(atom.name); f && f->functional)
        report({}, "bad-fact", "init fact " + atom.str() + " needs a value for a functional fluent");
    }
    for (const auto& [atom, value] : th.init_functions) {
      check_atom(atom, {}, "init");
      if (const auto* f = th.find_fluent(atom.name); f && !f->functional)
        report({}, "bad-fact", "init value for relational fluent " + atom.name);
    }
    for (const auto& a : th.alphabet) {
      const ActionDecl* decl = th.find_action(a.name);
      if (!decl)
        report({}, "bad-alphabet", "alphabet entry " + a.str() + " names no declared action");
      else if (decl->sig.object_arity() != a.args.size())
        report({}, "bad-alphabet", "alphabet entry " + a.str() + " has the wrong arity");
    }
  }

  void obligations() {
    for (const auto& o : th.obligations) {
      const std::string what = "obligation on " + o.trigger;
      const ActionDecl* trig = th.find_action(o.trigger);
      if (!trig) report(o.loc, "bad-obligation", what + ": trigger is not a declared action");
      for (const auto& s : o.stoppers)
        if (!th.find_action(s)) report(o.loc, "bad-obligation", what + ": stopper " + s + " is not a declared action");
      if (!is_situation_suppressed(o.obliged))
        report(o.loc, "bad-obligation", what + ": obliged formula must be situation-suppressed");
      if (o.type != ObligationType::Punctual && o.window.value() == 0)
        report(o.loc, "bad-obligation", what + ": window must be positive");
      if (o.type == ObligationType::Perdurant) {
        if (!o.deadline_offset)
          report(o.loc, "bad-obligation", what + ": perdurant obligations need a deadline");
        else if (o.deadline_offset->value() == 0 || *o.deadline_offset >= o.window)
          report(o.loc, "bad-obligation", what + ": deadline must lie strictly inside the window");
      } else if (o.deadline_offset) {
        report(o.loc, "bad-obligation", what + ": only perdurant obligations take a deadline");
      }
      if (is_achievement(o.type) && o.stoppers.empty())
        report(o.loc, "bad-obligation", what + ": achievement obligations need stoppers");
      if (trig) {
        std::set<std::string> allowed;
        for (const auto& p : trig->sig.params)
          if (p.sort != Sort::Time) allowed.insert(p.name);
        unbound(o.obliged, allowed, o.loc, what);
      }
    }
  }

  void compensations() {
    for (const auto& c : th.compensations) {
      const std::string what = "compensation for " + c.pattern.str();
      if (!is_situation_suppressed(c.pattern)) report(c.loc, "bad-compensation", what + ": pattern must be situation-suppressed");
      if (c.compensations.empty()) report(c.loc, "bad-compensation", what + ": empty compensation set");
      if (c.window.value() == 0) report(c.loc, "bad-compensation", what + ": window must be positive");
      std::set<std::string> allowed;
      free_variables(c.pattern, {}, allowed);
      for (const auto& f : c.compensations) {
        if (!is_situation_suppressed(f))
          report(c.loc, "bad-compensation", what + ": " + f.str() + " must be situation-suppressed");
        unbound(f, allowed, c.loc, what);
      }
    }
  }
};

}  // namespace

std::vector<Diagnostic> validate_theory(const Theory& theory) {
  Validator v{theory, {}};
  v.actions();
  v.fluents();
  v.facts();
  v.obligations();
  v.compensations();
  std::stable_sort(v.out.begin(), v.out.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.loc.line, a.loc.column) < std::tie(b.loc.line, b.loc.column);
  });
  return v.out;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string params_str(const std::vector<Param>& params) {
  std::string out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ", ";
    out += params[i].name + ": " + std::string(sort_name(params[i].sort));
  }
  return out;
}

}  // namespace

std::string print_theory(const Theory& th) {
  std::ostringstream out;
  if (th.epoch.value() != 0) out << "epoch " << th.epoch.value() << ".\n\n";
  for (const auto& a : th.actions) {
    out << "action " << a.sig.name << "(" << params_str(a.sig.params) << ")";
    if (a.precondition) out << "\n  poss: " << a.precondition->str();
    out << ".\n";
  }
  if (!th.actions.empty()) out << "\n";
  for (const auto& f : th.fluents) {
    out << (f.functional ? "funfluent " : "fluent ") << f.name << "(" << params_str(f.params) << ")";
    if (f.functional) out << ": " << sort_name(f.value_sort);
    if (f.ssa) out << "\n  ssa: " << f.ssa->str();
    out << ".\n";
  }
  if (!th.fluents.empty()) out << "\n";
  if (!th.rigids.empty()) {
    out << "rigid:";
    for (const auto& r : th.rigids) out << " " << r.str() << ".";
    out << "\n";
  }
  if (!th.init.empty() || !th.init_functions.empty()) {
    out << "init:";
    for (const auto& r : th.init) out << " " << r.str() << ".";
    for (const auto& [atom, value] : th.init_functions) out << " " << atom.str() << " == " << value << ".";
    out << "\n";
  }
  for (const auto& o : th.obligations) {
    out << "\nobliges " << o.trigger << " -> " << o.obliged.str() << "\n  type " << obligation_type_name(o.type);
    if (o.deadline_offset) out << " deadline " << o.deadline_offset->value();
    out << " window " << o.window.value();
    if (!o.stoppers.empty()) {
      out << " stoppers {";
      for (std::size_t i = 0; i < o.stoppers.size(); ++i) out << (i ? ", " : "") << o.stoppers[i];
      out << "}";
    }
    out << ".\n";
  }
  for (const auto& c : th.compensations) {
    out << "\ncompensate " << c.pattern.str() << " with {";
    for (std::size_t i = 0; i < c.compensations.size(); ++i) out << (i ? ", " : "") << c.compensations[i].str();
    out << "} window " << c.window.value() << ".\n";
  }
  if (!th.alphabet.empty()) {
    out << "\nalphabet:";
    for (const auto& a : th.alphabet) out << " " << a.str() << ".";
    out << "\n";
  }
  return out.str();
}

}  // namespace oblicalc
