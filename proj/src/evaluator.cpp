#include "oblicalc/evaluator.hpp"

#include <algorithm>
#include <set>

namespace oblicalc {

// ---------------------------------------------------------------------------
// Trace

Trace::Trace(std::shared_ptr<const Theory> theory, std::vector<GroundAction> actions)
    : theory_(std::move(theory)), actions_(std::move(actions)) {
  Situation s = Situation::initial(theory_->epoch);
  prefixes_.push_back(s);
  for (const auto& a : actions_) {
    theory_->check_action(a);
    s = s.then(a);
    prefixes_.push_back(s);
  }
}

const Situation& Trace::prefix(std::size_t k) const {
  if (k >= prefixes_.size()) throw ContractError("trace has no prefix of length " + std::to_string(k));
  return prefixes_[k];
}

std::optional<std::size_t> Trace::index_of(const Situation& s) const {
  const std::size_t k = s.length();
  if (k < prefixes_.size() && prefixes_[k] == s) return k;
  return std::nullopt;
}

std::vector<std::string> Trace::universe() const {
  auto consts = theory_->constants();
  std::set<std::string> all(consts.begin(), consts.end());
  for (const auto& a : actions_) all.insert(a.args.begin(), a.args.end());
  return {all.begin(), all.end()};
}

std::string value_str(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::string>)
          return x;
        else if constexpr (std::is_same_v<T, TimePoint>)
          return std::to_string(x.value());
        else
          return x.str();
      },
      v);
}

// ---------------------------------------------------------------------------
// Evaluator

namespace {

using K = Formula::Kind;

constexpr const char* kSituationSlot = "$s";

template <typename T>
const T& as(const Value& v, const char* what) {
  if (const T* p = std::get_if<T>(&v)) return *p;
  throw EvalError(std::string("expected ") + what + ", got " + value_str(v));
}

void flatten(const Formula& f, K kind, std::vector<Formula>& out) {
  if (f.kind() == kind) {
    flatten(f.children()[0], kind, out);
    flatten(f.children()[1], kind, out);
  } else {
    out.push_back(f);
  }
}

bool in_action_or_equality(const Term& t, const std::string& var, bool inside_action) {
  if (t.kind() == Term::Kind::Variable) return inside_action && t.name() == var;
  const bool action = inside_action || t.kind() == Term::Kind::Action;
  for (const auto& a : t.args())
    if (in_action_or_equality(a, var, action)) return true;
  return false;
}

// A time variable is guarded when it occurs inside an action term or as a
// side of an equality; its range is then the active time domain.
bool guarded(const Formula& f, const std::string& var) {
  if (f.kind() == K::Equal)
    for (const auto& t : f.terms())
      if ((t.kind() == Term::Kind::Variable && t.name() == var) || in_action_or_equality(t, var, false)) return true;
  for (const auto& t : f.terms())
    if (in_action_or_equality(t, var, false)) return true;
  for (const auto& c : f.children())
    if (guarded(c, var)) return true;
  return false;
}

bool mentions_any(const Term& t, const std::set<std::string>& vars) {
  for (const auto& v : vars)
    if (t.mentions_variable(v)) return true;
  return false;
}

enum class Unify : std::uint8_t { Unknown, Fail, Ok };

bool sit_rel(const Situation& a, SitRel rel, const Situation& b) {
  switch (rel) {
    case SitRel::Less: return a.precedes(b);
    case SitRel::Equal: return a == b;
    case SitRel::LessEq: return a.precedes_eq(b);
  }
  return false;
}

void collect_env_symbols(const Bindings& env, std::set<std::string>& objects, std::set<TimePoint>& times,
                         std::set<GroundAction>& actions) {
  auto add_action = [&](const GroundAction& a) {
    objects.insert(a.args.begin(), a.args.end());
    times.insert(a.time);
    actions.insert(a);
  };
  for (const auto& [name, v] : env) {
    if (const auto* o = std::get_if<std::string>(&v)) objects.insert(*o);
    if (const auto* t = std::get_if<TimePoint>(&v)) times.insert(*t);
    if (const auto* a = std::get_if<GroundAction>(&v)) add_action(*a);
    if (const auto* s = std::get_if<Situation>(&v)) {
      times.insert(s->start());
      for (const auto& a : s->actions()) add_action(a);
    }
  }
}

}  // namespace

Evaluator::Evaluator(std::shared_ptr<const Theory> theory, std::vector<std::string> constants)
    : theory_(std::move(theory)) {
  auto base = theory_->constants();
  std::set<std::string> all(base.begin(), base.end());
  all.insert(constants.begin(), constants.end());
  universe_.assign(all.begin(), all.end());
  theory_times_ = theory_->time_literals();
}

void Evaluator::clear_cache() const {
  std::lock_guard lock(mutex_);
  fluent_memo_.clear();
  function_memo_.clear();
}

const FluentDecl& Evaluator::fluent_decl(const std::string& name, bool functional) const {
  const FluentDecl* decl = theory_->find_fluent(name);
  if (!decl) throw EvalError("undeclared fluent " + name);
  if (decl->functional != functional)
    throw EvalError(name + (functional ? " is a relational fluent" : " is a functional fluent"));
  return *decl;
}

bool Evaluator::eval_fluent(const GroundAtom& atom, const Situation& s) const {
  const FluentDecl& decl = fluent_decl(atom.name, false);
  if (decl.params.size() != atom.args.size()) throw EvalError("wrong arity in " + atom.str());
  return fluent_value(atom, s);
}

std::string Evaluator::eval_function(const GroundAtom& f, const Situation& s) const {
  const FluentDecl& decl = fluent_decl(f.name, true);
  if (decl.params.size() != f.args.size()) throw EvalError("wrong arity in " + f.str());
  return function_value(f, s);
}

bool Evaluator::initially(const GroundAtom& atom) const { return theory_->init.count(atom) > 0; }

std::string Evaluator::initial_value(const GroundAtom& f) const {
  auto it = theory_->init_functions.find(f);
  if (it == theory_->init_functions.end()) throw EvalError("no initial value for " + f.str());
  return it->second;
}

bool Evaluator::ssa_body(const FluentDecl& decl, const std::vector<std::string>& args, const Situation& s,
                         const std::optional<std::string>& value) const {
  if (!decl.ssa) throw EvalError("fluent " + decl.name + " has no successor state axiom");
  Bindings env;
  for (std::size_t i = 0; i < decl.params.size(); ++i) env[decl.params[i].name] = args[i];
  env["a"] = s.last_action();
  env["s"] = s.predecessor();
  if (value) env[std::string(Theory::kValueVariable)] = *value;
  return eval(*decl.ssa, env);
}

bool Evaluator::fluent_value(const GroundAtom& atom, const Situation& s) const {
  if (s.is_initial()) return initially(atom);
  Key key{atom.str(), s.identity()};
  {
    std::lock_guard lock(mutex_);
    if (auto it = fluent_memo_.find(key); it != fluent_memo_.end()) return it->second.second;
  }
  const bool v = ssa_body(fluent_decl(atom.name, false), atom.args, s, std::nullopt);
  std::lock_guard lock(mutex_);
  fluent_memo_.emplace(std::move(key), std::make_pair(s, v));
  return v;
}

std::string Evaluator::ssa_function(const FluentDecl& decl, const GroundAtom& f, const Situation& s) const {
  if (!decl.ssa) throw EvalError("fluent " + decl.name + " has no successor state axiom");
  std::vector<Formula> disjuncts;
  flatten(*decl.ssa, K::Or, disjuncts);
  for (const auto& d : disjuncts) {
    for (const auto& v : universe_) {
      Bindings env;
      for (std::size_t i = 0; i < decl.params.size(); ++i) env[decl.params[i].name] = f.args[i];
      env["a"] = s.last_action();
      env["s"] = s.predecessor();
      env[std::string(Theory::kValueVariable)] = v;
      if (eval(d, env)) return v;
    }
  }
  throw EvalError("no value satisfies the successor state axiom of " + f.str() + " at " + s.str());
}

std::string Evaluator::function_value(const GroundAtom& f, const Situation& s) const {
  if (s.is_initial()) return initial_value(f);
  Key key{f.str(), s.identity()};
  {
    std::lock_guard lock(mutex_);
    if (auto it = function_memo_.find(key); it != function_memo_.end()) return it->second.second;
  }
  std::string v = ssa_function(fluent_decl(f.name, true), f, s);
  std::lock_guard lock(mutex_);
  function_memo_.emplace(std::move(key), std::make_pair(s, v));
  return v;
}

bool Evaluator::eval_poss(const GroundAction& a, const Situation& s) const {
  const ActionDecl* decl = theory_->find_action(a.functor);
  if (!decl) throw EvalError("undeclared action " + a.functor);
  decl->sig.check(a);
  if (!decl->precondition) throw EvalError("action " + a.functor + " has no precondition axiom");
  Bindings env;
  const auto& params = decl->sig.params;
  for (std::size_t i = 0; i + 1 < params.size(); ++i) env[params[i].name] = a.args[i];
  env[params.back().name] = a.time;
  env["s"] = s;
  return eval(*decl->precondition, env);
}

bool Evaluator::eval_formula(const Formula& w, const Bindings& env) const {
  Bindings copy = env;
  return eval(w, copy);
}

bool Evaluator::holds(const Formula& suppressed, const Situation& s) const {
  const Formula restored = restore(suppressed, Term::variable(kSituationSlot, Sort::Situation));
  Bindings env{{kSituationSlot, s}};
  return eval(restored, env);
}

Value Evaluator::eval_term(const Term& t, const Bindings& env) const {
  using TK = Term::Kind;
  switch (t.kind()) {
    case TK::Variable: {
      auto it = env.find(t.name());
      if (it == env.end()) throw EvalError("unbound variable " + t.name());
      return it->second;
    }
    case TK::Constant: return t.name();
    case TK::Number: return t.number_value();
    case TK::Initial: return Situation::initial(theory_->epoch);
    case TK::Action: {
      GroundAction a;
      a.functor = t.name();
      const auto args = t.args();
      for (std::size_t i = 0; i + 1 < args.size(); ++i) a.args.push_back(as<std::string>(eval_term(args[i], env), "an object"));
      a.time = as<TimePoint>(eval_term(args.back(), env), "a time");
      return a;
    }
    case TK::Do: {
      GroundAction a = as<GroundAction>(eval_term(t.args()[0], env), "an action");
      return as<Situation>(eval_term(t.args()[1], env), "a situation").then(std::move(a));
    }
    case TK::Start: return as<Situation>(eval_term(t.args()[0], env), "a situation").start();
    case TK::TimeOf: return as<GroundAction>(eval_term(t.args()[0], env), "an action").time;
    case TK::Plus:
      return TimePoint{as<TimePoint>(eval_term(t.args()[0], env), "a time").value() +
                       as<TimePoint>(eval_term(t.args()[1], env), "a time").value()};
    case TK::Function: {
      if (!t.situation()) throw EvalError("functional fluent " + t.str() + " has no situation argument");
      GroundAtom f{t.name(), {}};
      for (const auto& a : t.args()) f.args.push_back(as<std::string>(eval_term(a, env), "an object"));
      return eval_function(f, as<Situation>(eval_term(*t.situation(), env), "a situation"));
    }
  }
  throw EvalError("cannot evaluate " + t.str());
}

bool Evaluator::eval(const Formula& w, Bindings& env) const {
  switch (w.kind()) {
    case K::True: return true;
    case K::False: return false;
    case K::Fluent: {
      if (!w.situation()) throw EvalError("fluent " + w.str() + " has no situation argument");
      GroundAtom atom{w.name(), {}};
      for (const auto& t : w.terms()) atom.args.push_back(as<std::string>(eval_term(t, env), "an object"));
      return eval_fluent(atom, as<Situation>(eval_term(*w.situation(), env), "a situation"));
    }
    case K::Rigid: {
      GroundAtom atom{w.name(), {}};
      for (const auto& t : w.terms()) atom.args.push_back(value_str(eval_term(t, env)));
      return theory_->rigids.count(atom) > 0;
    }
    case K::Poss:
      return eval_poss(as<GroundAction>(eval_term(w.terms()[0], env), "an action"),
                       as<Situation>(eval_term(w.terms()[1], env), "a situation"));
    case K::Equal: return eval_term(w.terms()[0], env) == eval_term(w.terms()[1], env);
    case K::Less:
      return as<TimePoint>(eval_term(w.terms()[0], env), "a time") < as<TimePoint>(eval_term(w.terms()[1], env), "a time");
    case K::LessEq:
      return as<TimePoint>(eval_term(w.terms()[0], env), "a time") <= as<TimePoint>(eval_term(w.terms()[1], env), "a time");
    case K::SitLess:
      return as<Situation>(eval_term(w.terms()[0], env), "a situation")
          .precedes(as<Situation>(eval_term(w.terms()[1], env), "a situation"));
    case K::SitLessEq:
      return as<Situation>(eval_term(w.terms()[0], env), "a situation")
          .precedes_eq(as<Situation>(eval_term(w.terms()[1], env), "a situation"));
    case K::Not: return !eval(w.children()[0], env);
    case K::And: return eval(w.children()[0], env) && eval(w.children()[1], env);
    case K::Or: return eval(w.children()[0], env) || eval(w.children()[1], env);
    case K::Implies: return !eval(w.children()[0], env) || eval(w.children()[1], env);
    case K::Iff: return eval(w.children()[0], env) == eval(w.children()[1], env);
    case K::Exists:
    case K::Forall: return eval_quantifier(w, env);
    case K::BoundedExists:
    case K::BoundedForall: return eval_bounded(w, env);
  }
  throw EvalError("cannot evaluate " + w.str());
}

std::vector<Value> Evaluator::domain(const Term& var, const Formula& body, const Bindings& env) const {
  std::set<std::string> objects(universe_.begin(), universe_.end());
  std::set<TimePoint> times(theory_times_.begin(), theory_times_.end());
  std::set<GroundAction> actions;
  collect_env_symbols(env, objects, times, actions);
  std::vector<Value> out;
  switch (var.sort()) {
    case Sort::Object:
      for (const auto& o : objects) out.emplace_back(o);
      break;
    case Sort::Time:
      if (!guarded(body, var.name()))
        throw EvalError("unguarded time quantifier over " + var.name() + ": the range would be infinite");
      for (const auto& t : times) out.emplace_back(t);
      break;
    case Sort::Action:
      for (const auto& a : actions) out.emplace_back(a);
      break;
    case Sort::Situation:
      throw EvalError("situation quantifier over " + var.name() + " is not bounded");
  }
  return out;
}

namespace {

// Matches a pattern term against a value, binding quantified variables.
Unify unify(const Evaluator& ev, const Term& pattern, const Value& v, const std::set<std::string>& vars, Bindings& env,
            std::set<std::string>& bound) {
  using TK = Term::Kind;
  if (!mentions_any(pattern, vars)) return ev.eval_term(pattern, env) == v ? Unify::Ok : Unify::Fail;
  if (pattern.kind() == TK::Variable) {
    if (bound.count(pattern.name())) return env.at(pattern.name()) == v ? Unify::Ok : Unify::Fail;
    env[pattern.name()] = v;
    bound.insert(pattern.name());
    return Unify::Ok;
  }
  if (pattern.kind() != TK::Action) return Unify::Unknown;
  const auto* a = std::get_if<GroundAction>(&v);
  if (!a || a->functor != pattern.name() || a->args.size() + 1 != pattern.args().size()) return Unify::Fail;
  for (std::size_t i = 0; i < pattern.args().size(); ++i) {
    const Value arg = i + 1 < pattern.args().size() ? Value(a->args[i]) : Value(a->time);
    const Unify r = unify(ev, pattern.args()[i], arg, vars, env, bound);
    if (r != Unify::Ok) return r;
  }
  return Unify::Ok;
}

}  // namespace

bool Evaluator::eval_quantifier(const Formula& w, Bindings& env) const {
  const bool exists = w.kind() == K::Exists;
  const Formula& body = w.children()[0];
  std::set<std::string> names;
  for (const auto& v : w.vars()) names.insert(v.name());

  Bindings saved;
  std::set<std::string> absent;
  for (const auto& n : names) {
    if (auto it = env.find(n); it != env.end())
      saved.emplace(n, it->second);
    else
      absent.insert(n);
  }
  auto restore_env = [&] {
    for (const auto& n : absent) env.erase(n);
    for (const auto& [n, v] : saved) env[n] = v;
  };
  for (const auto& n : names) env.erase(n);

  // Equalities among the top-level conjuncts of an existential body fix
  // their variables outright.
  std::set<std::string> bound;
  if (exists) {
    std::vector<Formula> conjuncts;
    flatten(body, K::And, conjuncts);
    for (const auto& c : conjuncts) {
      if (c.kind() != K::Equal) continue;
      const Term& lhs = c.terms()[0];
      const Term& rhs = c.terms()[1];
      std::set<std::string> open;
      for (const auto& n : names)
        if (!bound.count(n)) open.insert(n);
      Unify r = Unify::Unknown;
      Bindings trial = env;
      std::set<std::string> trial_bound = bound;
      if (!mentions_any(rhs, open)) {
        r = unify(*this, lhs, eval_term(rhs, env), open, trial, trial_bound);
      } else if (!mentions_any(lhs, open)) {
        r = unify(*this, rhs, eval_term(lhs, env), open, trial, trial_bound);
      }
      if (r == Unify::Fail) {
        restore_env();
        return false;
      }
      if (r == Unify::Ok) {
        env = std::move(trial);
        bound = std::move(trial_bound);
      }
    }
  }

  std::vector<Term> free_vars;
  for (const auto& v : w.vars())
    if (!bound.count(v.name())) free_vars.push_back(v);
  std::vector<std::vector<Value>> domains;
  for (const auto& v : free_vars) domains.push_back(domain(v, body, env));

  bool result = !exists;
  std::vector<std::size_t> idx(free_vars.size(), 0);
  const bool empty = std::any_of(domains.begin(), domains.end(), [](const auto& d) { return d.empty(); });
  if (!empty) {
    while (true) {
      for (std::size_t i = 0; i < free_vars.size(); ++i) env[free_vars[i].name()] = domains[i][idx[i]];
      const bool v = eval(body, env);
      if (exists && v) {
        result = true;
        break;
      }
      if (!exists && !v) {
        result = false;
        break;
      }
      std::size_t i = 0;
      while (i < idx.size() && ++idx[i] == domains[i].size()) idx[i++] = 0;
      if (i == idx.size()) break;
    }
  }
  for (const auto& n : names) env.erase(n);
  restore_env();
  return result;
}

bool Evaluator::eval_bounded(const Formula& w, Bindings& env) const {
  const auto& b = w.bound();
  const bool exists = w.kind() == K::BoundedExists;
  const Situation upper = as<Situation>(eval_term(b.upper, env), "a situation");
  std::optional<Situation> lower;
  if (b.lower) lower = as<Situation>(eval_term(*b.lower, env), "a situation");

  const std::string& name = b.var.name();
  std::optional<Value> saved;
  if (auto it = env.find(name); it != env.end()) saved = it->second;

  bool result = !exists;
  for (std::size_t k = 0; k <= upper.length(); ++k) {
    env[name] = upper.prefix(k);
    const Situation middle = as<Situation>(eval_term(b.middle, env), "a situation");
    const bool in_range = sit_rel(middle, b.upper_rel, upper) && (!lower || sit_rel(*lower, b.lower_rel, middle));
    if (!in_range) continue;
    const bool v = eval(w.children()[0], env);
    if (exists && v) {
      result = true;
      break;
    }
    if (!exists && !v) {
      result = false;
      break;
    }
  }
  if (saved)
    env[name] = *saved;
  else
    env.erase(name);
  return result;
}

// ---------------------------------------------------------------------------
// Progression

namespace {

void tuples(const std::vector<std::string>& universe, std::size_t arity, std::vector<std::string>& cur,
            std::vector<std::vector<std::string>>& out) {
  if (cur.size() == arity) {
    out.push_back(cur);
    return;
  }
  for (const auto& c : universe) {
    cur.push_back(c);
    tuples(universe, arity, cur, out);
    cur.pop_back();
  }
}

}  // namespace

Progression::Progression(const Trace& trace) : Evaluator(trace), trace_(trace) {
  std::set<GroundAtom> init_atoms = theory().init;
  states_.push_back(std::move(init_atoms));
  functions_.push_back({theory().init_functions.begin(), theory().init_functions.end()});
  for (std::size_t k = 1; k <= trace.size(); ++k) {
    const Situation& s = trace.prefix(k);
    std::set<GroundAtom> next;
    std::map<GroundAtom, std::string> next_fn;
    for (const auto& decl : theory().fluents) {
      std::vector<std::vector<std::string>> all;
      std::vector<std::string> cur;
      tuples(universe(), decl.params.size(), cur, all);
      for (auto& args : all) {
        GroundAtom atom{decl.name, args};
        if (decl.functional) {
          // Atoms without an initial value stay undefined until the SSA forces one.
          try {
            next_fn[atom] = ssa_function(decl, atom, s);
          } catch (const EvalError&) {
          }
        } else if (ssa_body(decl, args, s, std::nullopt)) {
          next.insert(std::move(atom));
        }
      }
    }
    states_.push_back(std::move(next));
    functions_.push_back(std::move(next_fn));
  }
}

std::size_t Progression::index(const Situation& s) const {
  auto k = trace_.index_of(s);
  if (!k) throw EvalError("progression covers only prefixes of its trace, not " + s.str());
  if (*k >= states_.size()) throw EvalError("progression has not reached " + s.str());
  return *k;
}

bool Progression::fluent_value(const GroundAtom& atom, const Situation& s) const {
  return states_[index(s)].count(atom) > 0;
}

std::string Progression::function_value(const GroundAtom& f, const Situation& s) const {
  const auto& table = functions_[index(s)];
  auto it = table.find(f);
  if (it == table.end()) throw EvalError("no value for " + f.str() + " at " + s.str());
  return it->second;
}

// ---------------------------------------------------------------------------
// Executability

ExecutabilityReport executable_detail(const Evaluator& ev, const Situation& s, std::span<const CompensationBlock> blocks) {
  ExecutabilityReport r;
  const auto actions = s.actions();
  Situation prev = Situation::initial(s.epoch());
  for (std::size_t j = 1; j <= actions.size(); ++j) {
    const GroundAction& a = actions[j - 1];
    if (!r.time_regression && a.time < prev.start()) r.time_regression = j;
    if (!r.impossible) {
      bool possible = false;
      try {
        possible = ev.eval_poss(a, prev);
      } catch (const Error&) {
        possible = false;
      }
      if (!possible) r.impossible = j;
    }
    if (!r.blocked) {
      for (const auto& b : blocks) {
        const bool pending = b.detected_at <= j - 1 && (!b.resolved_at || *b.resolved_at > j - 1);
        if (pending && a.time >= b.enabling_time) {
          r.blocked = j;
          break;
        }
      }
    }
    prev = prev.then(a);
  }
  const std::size_t none = actions.size() + 1;
  const std::size_t first = std::min({r.impossible.value_or(none), r.time_regression.value_or(none), r.blocked.value_or(none)});
  if (first == none) return r;
  r.executable = false;
  const GroundAction& a = actions[first - 1];
  if (r.time_regression == first)
    r.reason = "action " + std::to_string(first) + " " + a.str() + " occurs before the start of its situation";
  else if (r.impossible == first)
    r.reason = "action " + std::to_string(first) + " " + a.str() + " is not possible";
  else
    r.reason = "action " + std::to_string(first) + " " + a.str() + " is executed while a compensation is pending";
  return r;
}

bool executable(const Evaluator& ev, const Situation& s, std::span<const CompensationBlock> blocks) {
  return executable_detail(ev, s, blocks).executable;
}

}  // namespace oblicalc
