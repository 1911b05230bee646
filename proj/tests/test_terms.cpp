#include <random>

#include "doctest.h"
#include "support.hpp"

using namespace oblicalc;
using testkit::act;

namespace {

ActionSignature door_sig(const std::string& name) {
  return {name, {{"d", Sort::Object}, {"t", Sort::Time}}};
}

}  // namespace

TEST_CASE("time points are natural numbers") {
  CHECK(TimePoint{0}.value() == 0);
  CHECK_THROWS_AS(TimePoint{-1}, SortError);
  CHECK(TimePoint{3} < TimePoint{4});
}

TEST_CASE("mk_do builds situations whose start is the action time") {
  const Situation s0 = Situation::initial();
  const Situation s1 = mk_do(door_sig("unlock"), act("unlock(D, 10)"), s0);
  CHECK(s1.str() == "do(unlock(D, 10), S0)");
  CHECK(s1.start() == TimePoint{10});
  CHECK(s0.start() == TimePoint{0});
  CHECK(action_time(act("unlock(D, 10)")) == TimePoint{10});

  const auto list = testkit::acts({"unlock(D, 30)", "lock(D, 40)"});
  const Situation s2 = mk_do(list, s0);
  CHECK(s2.str() == "do(lock(D, 40), do(unlock(D, 30), S0))");
  CHECK(start(s2) == TimePoint{40});
  CHECK(s2.predecessor() == mk_do(std::span(list).first(1), s0));

  CHECK(mk_do(door_sig("lock"), act("lock(D, 1)"), s0) != mk_do(door_sig("unlock"), act("unlock(D, 1)"), s0));
  CHECK_THROWS_AS(mk_do(door_sig("lock"), act("lock(D, E, 1)"), s0), SortError);
  CHECK_THROWS_AS(mk_do(door_sig("lock"), act("unlock(D, 1)"), s0), SortError);
}

TEST_CASE("the epoch fixes start(S0)") {
  const Situation s0 = Situation::initial(TimePoint{5});
  CHECK(s0.start() == TimePoint{5});
  CHECK(s0.then(act("lock(D, 7)")).epoch() == TimePoint{5});
}

TEST_CASE("precedence is the prefix order") {
  const Situation s0 = Situation::initial();
  const Situation a1 = s0.then(act("unlock(D, 1)"));
  const Situation a2a1 = a1.then(act("lock(D, 2)"));
  const Situation a2 = s0.then(act("lock(D, 2)"));
  CHECK(precedes(s0, a1));
  CHECK_FALSE(precedes(a1, s0));
  CHECK_FALSE(precedes(s0, s0));
  CHECK(precedes_eq(s0, s0));
  CHECK(precedes(a1, a2a1));
  CHECK_FALSE(precedes(a2, a2a1));
}

TEST_CASE("precedence is a strict partial order on random situations") {
  std::mt19937_64 rng(7);
  std::vector<Situation> pool{Situation::initial()};
  for (int i = 0; i < 60; ++i) {
    const Situation& base = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    const auto& m = testkit::door_moves()[rng() % testkit::door_moves().size()];
    pool.push_back(base.then({m.name, m.args, TimePoint{static_cast<std::int64_t>(rng() % 4)}}));
  }
  for (const auto& a : pool) {
    CHECK_FALSE(precedes(a, Situation::initial()));
    CHECK_FALSE(precedes(a, a));
    CHECK(precedes_eq(a, a));
    for (const auto& b : pool) {
      if (precedes(a, b)) CHECK_FALSE(precedes(b, a));
      CHECK(precedes_eq(a, b) == (precedes(a, b) || a == b));
      for (const auto& c : pool)
        if (precedes(a, b) && precedes(b, c)) CHECK(precedes(a, c));
    }
  }
}

TEST_CASE("start of do is the action time for random actions") {
  std::mt19937_64 rng(11);
  Situation s = Situation::initial();
  for (int i = 0; i < 40; ++i) {
    const auto& m = testkit::door_moves()[rng() % testkit::door_moves().size()];
    const GroundAction a{m.name, m.args, TimePoint{static_cast<std::int64_t>(rng() % 50)}};
    const Situation next = s.then(a);
    CHECK(next.start() == action_time(a));
    CHECK(next.last_action() == a);
    CHECK(next.length() == s.length() + 1);
    s = next;
  }
}

TEST_CASE("terms print in the theory syntax") {
  const Term s = Term::variable("s", Sort::Situation);
  const Term a = Term::action("lock", {Term::constant("D"), Term::number(TimePoint{40})});
  const Term t = Term::do_(a, Term::do_(Term::action("unlock", {Term::constant("D"), Term::number(TimePoint{30})}),
                                        Term::initial()));
  CHECK(t.str() == "do(lock(D, 40), do(unlock(D, 30), S0))");
  CHECK(t.is_ground());
  CHECK_FALSE(Term::do_(a, s).is_ground());
  CHECK(situation_root(Term::do_(a, s)) == s);
  CHECK(rooted_at(Term::do_(a, s), s));
  CHECK_FALSE(rooted_at(Term::do_(a, s), Term::initial()));
  CHECK(Term::start(s).sort() == Sort::Time);
  CHECK_THROWS_AS(Term::do_(s, a), SortError);
}

TEST_CASE("restore and suppress are inverse") {
  auto door = testkit::load("door.bat");
  const Term s = Term::variable("s", Sort::Situation);
  const Term sigma = Term::do_(Term::action("unlock", {Term::constant("D"), Term::number(TimePoint{2})}),
                               Term::initial());
  for (const char* text : {"locked(D)", "open(D) and not locked(D)", "notifiedManager() == M",
                           "exists d: object. open(d) implies locked(d)"}) {
    const Formula phi = testkit::phi(*door, text);
    CHECK(is_situation_suppressed(phi));
    const Formula at_s = restore(phi, s);
    CHECK_FALSE(is_situation_suppressed(at_s));
    CHECK(suppress(at_s, s) == phi);
    CHECK(suppress(restore(phi, sigma), sigma) == phi);
    std::map<std::string, Term> sub{{"s", sigma}};
    CHECK(substitute(at_s, sub) == restore(phi, sigma));
  }
  const Formula mixed = parse_formula("locked(D, s) and open(D, S0)", *door, {{"s", Sort::Situation}});
  CHECK_THROWS_AS(suppress(mixed, s), ContractError);
}

TEST_CASE("match binds pattern variables to constants") {
  auto door = testkit::load("door.bat");
  const Formula pattern = parse_formula("locked(d)", *door, {{"d", Sort::Object}}, true);
  auto m = match(pattern, testkit::phi(*door, "locked(D)"));
  REQUIRE(m);
  CHECK(m->at("d") == Term::constant("D"));
  CHECK_FALSE(match(pattern, testkit::phi(*door, "open(D)")));
}
