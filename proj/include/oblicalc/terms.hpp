#pragma once

// Sorted terms of the four-sorted language: objects, actions, time points
// and situations. Ground situations are persistent do-chains; symbolic terms
// (with variables) are used inside formulas.

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oblicalc/error.hpp"

namespace oblicalc {

enum class Sort : std::uint8_t { Object, Action, Time, Situation };

std::string_view sort_name(Sort sort);
std::optional<Sort> parse_sort(std::string_view name);

/// A point on the natural-number time line.
class TimePoint {
 public:
  constexpr TimePoint() = default;
  explicit TimePoint(std::int64_t value) : value_(value) {
    if (value < 0) throw SortError("time points are natural numbers, got " + std::to_string(value));
  }

  std::int64_t value() const { return value_; }
  auto operator<=>(const TimePoint&) const = default;

 private:
  std::int64_t value_ = 0;
};

/// A ground atom over object constants, e.g. `door(D)` or `locked(D)`.
struct GroundAtom {
  std::string name;
  std::vector<std::string> args;

  auto operator<=>(const GroundAtom&) const = default;
  std::string str() const;
};

/// A ground action `A(c1, ..., cn, t)`; the time is always the last argument.
struct GroundAction {
  std::string functor;
  std::vector<std::string> args;
  TimePoint time;

  auto operator<=>(const GroundAction&) const = default;
  std::string str() const;
  GroundAtom untimed() const { return {functor, args}; }
};

inline TimePoint action_time(const GroundAction& a) { return a.time; }

struct Param {
  std::string name;
  Sort sort;

  auto operator<=>(const Param&) const = default;
};

/// Declared shape of an action function; the last parameter has sort Time.
struct ActionSignature {
  std::string name;
  std::vector<Param> params;

  std::size_t object_arity() const { return params.empty() ? 0 : params.size() - 1; }
  void check(const GroundAction& a) const;
};

/// Ground situation term: S0 or do(a, s). Immutable; shares structure with
/// its prefixes, compared structurally.
class Situation {
 public:
  static Situation initial(TimePoint epoch = TimePoint{0});

  bool is_initial() const { return node_ == nullptr; }
  std::size_t length() const;
  TimePoint start() const;
  TimePoint epoch() const { return epoch_; }

  /// Precondition: !is_initial().
  const GroundAction& last_action() const;
  Situation predecessor() const;
  Situation prefix(std::size_t n) const;
  std::vector<GroundAction> actions() const;

  /// do(a, *this) without signature checks.
  Situation then(GroundAction a) const;

  /// Strict prefix (⊏) and its reflexive closure (⊑).
  bool precedes(const Situation& other) const;
  bool precedes_eq(const Situation& other) const;

  bool operator==(const Situation& other) const;
  std::strong_ordering operator<=>(const Situation& other) const;

  std::string str() const;

  /// Identity of the last do-node; equal for S0. Stable while any copy lives.
  const void* identity() const { return node_.get(); }

 private:
  struct Node {
    GroundAction action;
    std::shared_ptr<const Node> parent;
    std::size_t length;
  };

  Situation(std::shared_ptr<const Node> node, TimePoint epoch) : node_(std::move(node)), epoch_(epoch) {}

  std::shared_ptr<const Node> node_;
  TimePoint epoch_;
};

/// do(a, s), checking `a` against its signature.
Situation mk_do(const ActionSignature& sig, const GroundAction& a, const Situation& s);
/// do([a1, ..., ak], s).
Situation mk_do(std::span<const GroundAction> actions, const Situation& s);

inline TimePoint start(const Situation& s) { return s.start(); }
inline bool precedes(const Situation& a, const Situation& b) { return a.precedes(b); }
inline bool precedes_eq(const Situation& a, const Situation& b) { return a.precedes_eq(b); }

/// Symbolic term. Immutable value with structural equality.
class Term {
 public:
  enum class Kind : std::uint8_t {
    Variable,   // x, of any sort
    Constant,   // object constant, e.g. D
    Number,     // time literal
    Initial,    // S0
    Action,     // A(args..., t)
    Do,         // do(a, s)
    Start,      // start(s)
    TimeOf,     // time(a)
    Plus,       // t + k
    Function,   // functional fluent f(args..., [s]); situation may be suppressed
  };

  Term() = default;

  static Term variable(std::string name, Sort sort);
  static Term constant(std::string name);
  static Term number(TimePoint value);
  static Term initial();
  static Term action(std::string functor, std::vector<Term> args);
  static Term do_(Term action, Term situation);
  static Term start(Term situation);
  static Term time_of(Term action);
  static Term plus(Term lhs, Term rhs);
  static Term function(std::string name, std::vector<Term> args, std::optional<Term> situation);

  bool valid() const { return node_ != nullptr; }
  Kind kind() const;
  Sort sort() const;
  const std::string& name() const;
  TimePoint number_value() const;
  /// Arguments; for Function these exclude the situation.
  std::span<const Term> args() const;
  /// Situation argument of a Function term, if not suppressed.
  const std::optional<Term>& situation() const;

  bool is_ground() const;
  bool mentions_variable(std::string_view name) const;

  bool operator==(const Term& other) const;
  std::strong_ordering operator<=>(const Term& other) const;

  std::string str() const;

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// For a situation term do(an, ... do(a1, root)), the root (S0 or a variable).
Term situation_root(const Term& situation);
/// All situation-sorted subterms of `t`, including `t` itself.
void collect_situation_terms(const Term& t, std::vector<Term>& out);
/// True iff `t` is a do-chain over `root` whose actions mention no situation
/// term other than `root`.
bool rooted_at(const Term& t, const Term& root);

/// Lexical convention: identifiers starting with an uppercase letter are
/// constants, all others are variables.
bool is_constant_name(std::string_view name);

}  // namespace oblicalc
