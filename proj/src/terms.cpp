#include "oblicalc/terms.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace oblicalc {

std::string_view sort_name(Sort sort) {
  switch (sort) {
    case Sort::Object: return "object";
    case Sort::Action: return "action";
    case Sort::Time: return "time";
    case Sort::Situation: return "situation";
  }
  return "?";
}

std::optional<Sort> parse_sort(std::string_view name) {
  if (name == "object") return Sort::Object;
  if (name == "action") return Sort::Action;
  if (name == "time") return Sort::Time;
  if (name == "situation") return Sort::Situation;
  return std::nullopt;
}

bool is_constant_name(std::string_view name) {
  return !name.empty() && std::isupper(static_cast<unsigned char>(name.front()));
}

namespace {

std::string join_args(const std::vector<std::string>& args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += args[i];
  }
  return out;
}

}  // namespace

std::string GroundAtom::str() const { return name + "(" + join_args(args) + ")"; }

std::string GroundAction::str() const {
  std::string out = functor + "(" + join_args(args);
  if (!args.empty()) out += ", ";
  return out + std::to_string(time.value()) + ")";
}

void ActionSignature::check(const GroundAction& a) const {
  if (a.functor != name) throw SortError("action " + a.str() + " is not an instance of " + name);
  if (a.args.size() != object_arity())
    throw SortError("action " + name + " expects " + std::to_string(object_arity()) +
                    " object argument(s) before its time, got " + std::to_string(a.args.size()));
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (params[i].sort != Sort::Object)
      throw SortError("parameter " + params[i].name + " of " + name + " is not of sort object");
    if (!is_constant_name(a.args[i]))
      throw SortError("argument '" + a.args[i] + "' of " + a.str() + " is not an object constant");
  }
}

// ---------------------------------------------------------------------------
// Situation

Situation Situation::initial(TimePoint epoch) { return Situation(nullptr, epoch); }

std::size_t Situation::length() const { return node_ ? node_->length : 0; }

TimePoint Situation::start() const { return node_ ? node_->action.time : epoch_; }

const GroundAction& Situation::last_action() const {
  if (!node_) throw ContractError("S0 has no last action");
  return node_->action;
}

Situation Situation::predecessor() const {
  if (!node_) throw ContractError("S0 has no predecessor");
  return Situation(node_->parent, epoch_);
}

Situation Situation::prefix(std::size_t n) const {
  if (n > length()) throw ContractError("prefix longer than the situation");
  auto node = node_;
  while (node && node->length > n) node = node->parent;
  return Situation(node, epoch_);
}

std::vector<GroundAction> Situation::actions() const {
  std::vector<GroundAction> out;
  out.reserve(length());
  for (auto node = node_; node; node = node->parent) out.push_back(node->action);
  std::reverse(out.begin(), out.end());
  return out;
}

Situation Situation::then(GroundAction a) const {
  auto node = std::make_shared<const Node>(Node{std::move(a), node_, length() + 1});
  return Situation(std::move(node), epoch_);
}

bool Situation::operator==(const Situation& other) const {
  if (epoch_ != other.epoch_ || length() != other.length()) return false;
  auto a = node_;
  auto b = other.node_;
  while (a && b) {
    if (a == b) return true;
    if (a->action != b->action) return false;
    a = a->parent;
    b = b->parent;
  }
  return a == b;
}

std::strong_ordering Situation::operator<=>(const Situation& other) const {
  if (auto c = epoch_ <=> other.epoch_; c != 0) return c;
  const auto lhs = actions();
  const auto rhs = other.actions();
  return std::lexicographical_compare_three_way(lhs.begin(), lhs.end(), rhs.begin(), rhs.end());
}

bool Situation::precedes(const Situation& other) const {
  return length() < other.length() && other.prefix(length()) == *this;
}

bool Situation::precedes_eq(const Situation& other) const {
  return length() <= other.length() && other.prefix(length()) == *this;
}

std::string Situation::str() const {
  std::string out = "S0";
  for (const auto& a : actions()) out = "do(" + a.str() + ", " + out + ")";
  return out;
}

Situation mk_do(const ActionSignature& sig, const GroundAction& a, const Situation& s) {
  sig.check(a);
  return s.then(a);
}

Situation mk_do(std::span<const GroundAction> actions, const Situation& s) {
  Situation out = s;
  for (const auto& a : actions) out = out.then(a);
  return out;
}

// ---------------------------------------------------------------------------
// Term

struct Term::Node {
  Kind kind;
  Sort sort;
  std::string name;
  TimePoint number;
  std::vector<Term> args;
  std::optional<Term> situation;
};

namespace {

void require_sort(const Term& t, Sort sort, const char* where) {
  if (t.sort() != sort)
    throw SortError(std::string(where) + ": expected a term of sort " + std::string(sort_name(sort)) + ", got " +
                    t.str() + " of sort " + std::string(sort_name(t.sort())));
}

}  // namespace

Term Term::variable(std::string name, Sort sort) {
  return Term(std::make_shared<const Node>(Node{Kind::Variable, sort, std::move(name), {}, {}, {}}));
}

Term Term::constant(std::string name) {
  return Term(std::make_shared<const Node>(Node{Kind::Constant, Sort::Object, std::move(name), {}, {}, {}}));
}

Term Term::number(TimePoint value) {
  return Term(std::make_shared<const Node>(Node{Kind::Number, Sort::Time, {}, value, {}, {}}));
}

Term Term::initial() {
  static const Term s0(std::make_shared<const Node>(Node{Kind::Initial, Sort::Situation, "S0", {}, {}, {}}));
  return s0;
}

Term Term::action(std::string functor, std::vector<Term> args) {
  if (args.empty()) throw SortError("action " + functor + " needs a time argument");
  require_sort(args.back(), Sort::Time, "last argument of an action");
  return Term(std::make_shared<const Node>(Node{Kind::Action, Sort::Action, std::move(functor), {}, std::move(args), {}}));
}

Term Term::do_(Term action, Term situation) {
  require_sort(action, Sort::Action, "do");
  require_sort(situation, Sort::Situation, "do");
  return Term(std::make_shared<const Node>(
      Node{Kind::Do, Sort::Situation, "do", {}, {std::move(action), std::move(situation)}, {}}));
}

Term Term::start(Term situation) {
  require_sort(situation, Sort::Situation, "start");
  return Term(std::make_shared<const Node>(Node{Kind::Start, Sort::Time, "start", {}, {std::move(situation)}, {}}));
}

Term Term::time_of(Term action) {
  require_sort(action, Sort::Action, "time");
  return Term(std::make_shared<const Node>(Node{Kind::TimeOf, Sort::Time, "time", {}, {std::move(action)}, {}}));
}

Term Term::plus(Term lhs, Term rhs) {
  require_sort(lhs, Sort::Time, "+");
  require_sort(rhs, Sort::Time, "+");
  return Term(std::make_shared<const Node>(Node{Kind::Plus, Sort::Time, "+", {}, {std::move(lhs), std::move(rhs)}, {}}));
}

Term Term::function(std::string name, std::vector<Term> args, std::optional<Term> situation) {
  if (situation) require_sort(*situation, Sort::Situation, "functional fluent");
  return Term(std::make_shared<const Node>(
      Node{Kind::Function, Sort::Object, std::move(name), {}, std::move(args), std::move(situation)}));
}

Term::Kind Term::kind() const { return node_->kind; }
Sort Term::sort() const { return node_->sort; }
const std::string& Term::name() const { return node_->name; }
TimePoint Term::number_value() const { return node_->number; }
std::span<const Term> Term::args() const { return node_->args; }
const std::optional<Term>& Term::situation() const { return node_->situation; }

bool Term::is_ground() const {
  if (kind() == Kind::Variable) return false;
  for (const auto& a : args())
    if (!a.is_ground()) return false;
  return !situation() || situation()->is_ground();
}

bool Term::mentions_variable(std::string_view name) const {
  if (kind() == Kind::Variable) return this->name() == name;
  for (const auto& a : args())
    if (a.mentions_variable(name)) return true;
  return situation() && situation()->mentions_variable(name);
}

bool Term::operator==(const Term& other) const { return (*this <=> other) == 0; }

std::strong_ordering Term::operator<=>(const Term& other) const {
  if (node_ == other.node_) return std::strong_ordering::equal;
  if (!node_) return std::strong_ordering::less;
  if (!other.node_) return std::strong_ordering::greater;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (auto c = a.kind <=> b.kind; c != 0) return c;
  if (auto c = a.sort <=> b.sort; c != 0) return c;
  if (auto c = a.name <=> b.name; c != 0) return c;
  if (auto c = a.number <=> b.number; c != 0) return c;
  if (auto c = std::lexicographical_compare_three_way(a.args.begin(), a.args.end(), b.args.begin(), b.args.end()); c != 0)
    return c;
  return a.situation <=> b.situation;
}

std::string Term::str() const {
  if (!node_) return "<invalid>";
  std::ostringstream out;
  auto list = [&](std::span<const Term> ts) {
    for (std::size_t i = 0; i < ts.size(); ++i) out << (i ? ", " : "") << ts[i].str();
  };
  switch (kind()) {
    case Kind::Variable:
    case Kind::Constant:
    case Kind::Initial: out << name(); break;
    case Kind::Number: out << number_value().value(); break;
    case Kind::Action:
    case Kind::Do:
    case Kind::Start:
    case Kind::TimeOf:
      out << name() << "(";
      list(args());
      out << ")";
      break;
    case Kind::Plus: out << args()[0].str() << " + " << args()[1].str(); break;
    case Kind::Function:
      out << name() << "(";
      list(args());
      if (situation()) out << (args().empty() ? "" : ", ") << situation()->str();
      out << ")";
      break;
  }
  return out.str();
}

Term situation_root(const Term& situation) {
  Term t = situation;
  while (t.kind() == Term::Kind::Do) t = t.args()[1];
  return t;
}

void collect_situation_terms(const Term& t, std::vector<Term>& out) {
  if (t.sort() == Sort::Situation) out.push_back(t);
  for (const auto& a : t.args()) collect_situation_terms(a, out);
  if (t.situation()) collect_situation_terms(*t.situation(), out);
}

bool rooted_at(const Term& t, const Term& root) {
  if (t.sort() != Sort::Situation) return false;
  Term cur = t;
  while (cur.kind() == Term::Kind::Do) {
    std::vector<Term> inner;
    collect_situation_terms(cur.args()[0], inner);
    for (const auto& s : inner)
      if (s != root) return false;
    cur = cur.args()[1];
  }
  return cur == root && (cur.kind() == Term::Kind::Initial || cur.kind() == Term::Kind::Variable);
}

}  // namespace oblicalc
