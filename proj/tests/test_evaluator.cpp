#include <random>

#include "doctest.h"
#include "support.hpp"

using namespace oblicalc;
using testkit::act;
using testkit::acts;

namespace {

Situation sit(std::initializer_list<const char*> texts) {
  const auto as = acts(texts);
  return mk_do(as, Situation::initial());
}

bool holds(const Evaluator& ev, const Theory& th, const std::string& text) {
  return ev.eval_formula(parse_formula(text, th));
}

const char* kHistory = R"(
action go(d: object, t: time)
  poss: true.
action shut(d: object, t: time)
  poss: wasOpen(d, s).
fluent open(d: object)
  ssa: (exists t: time. a == go(d, t)) or (open(d, s) and not (exists t: time. a == shut(d, t))).
fluent wasOpen(d: object)
  ssa: (exists t: time. a == go(d, t)) or (exists s1: s1 <<= s. open(d, s1)).
fluent reshut(d: object)
  ssa: (exists t: time. a == shut(d, t)) and (exists s1: s1 << s. wasOpen(d, s1) and not open(d, s1)).
init: open(B).
)";

}  // namespace

TEST_CASE("fluent values follow the door successor state axioms") {
  auto th = testkit::load("door.bat");
  Evaluator ev(th);
  const Situation s0 = Situation::initial();
  const Situation pressed = sit({"pressButton(D, E, 1)"});
  CHECK(ev.eval_fluent({"open", {"D"}}, pressed));
  CHECK(ev.eval_fluent({"locked", {"D"}}, s0));
  CHECK_FALSE(ev.eval_fluent({"locked", {"D"}}, pressed));
  CHECK(ev.eval_fluent({"locked", {"D"}}, sit({"pressButton(D, M, 1)"})));
  CHECK(ev.eval_fluent({"open", {"D"}}, sit({"pressButton(D, M, 1)"})));
  CHECK(holds(ev, *th, "open(D, do(pressButton(D, E, 1), S0)) and not locked(D, do(pressButton(D, E, 1), S0))"));

  const Situation relocked = sit({"unlock(D, 2)", "lock(D, 3)"});
  CHECK(ev.eval_fluent({"locked", {"D"}}, relocked));
  CHECK_FALSE(ev.eval_fluent({"open", {"D"}}, relocked));
  CHECK(ev.eval_fluent({"at", {"D"}}, sit({"moveTo(D, 1)"})));
  CHECK_FALSE(ev.eval_fluent({"at", {"D"}}, sit({"moveTo(D, 1)", "moveTo(D2, 2)"})));
  CHECK_THROWS_AS(ev.eval_fluent({"closed", {"D"}}, s0), EvalError);
}

TEST_CASE("functional fluents take the newest assignment") {
  auto th = testkit::load("door.bat");
  Evaluator ev(th);
  CHECK(ev.eval_function({"notifiedManager", {}}, Situation::initial()) == "Nobody");
  CHECK(ev.eval_function({"notifiedManager", {}}, sit({"notify(M, 3)"})) == "M");
  CHECK(ev.eval_function({"notifiedManager", {}}, sit({"notify(E, 3)"})) == "Nobody");
  CHECK(ev.eval_function({"notifiedManager", {}}, sit({"notify(M, 3)", "lock(D, 4)"})) == "M");
  CHECK(ev.holds(testkit::phi(*th, "notifiedManager() == M"), sit({"notify(M, 3)"})));
}

TEST_CASE("bounded quantifiers range over prefixes") {
  auto th = testkit::load("door.bat");
  Evaluator ev(th);
  CHECK(holds(ev, *th, "exists s1: s1 <<= do(unlock(D, 10), S0). locked(D, s1)"));
  CHECK_FALSE(holds(ev, *th, "forall s1: s1 <<= do(unlock(D, 10), S0). locked(D, s1)"));
  CHECK(holds(ev, *th, "not (exists s1: s1 << S0. locked(D, s1))"));
  CHECK(holds(ev, *th, "not (exists s1: s1 << S0. true)"));
  CHECK(holds(ev, *th, "forall s1: s1 << S0. false"));
  CHECK(holds(ev, *th, "exists s1: S0 << s1 <<= do(unlock(D, 10), S0). not locked(D, s1)"));
}

TEST_CASE("time and situation quantifiers need a finite range") {
  auto th = testkit::load("door.bat");
  Evaluator ev(th);
  CHECK_THROWS_AS(holds(ev, *th, "exists t: time. t <= 3"), EvalError);
  CHECK_THROWS_AS(holds(ev, *th, "exists q: situation. locked(D, q)"), EvalError);
  CHECK(holds(ev, *th, "exists x: object. door(x)"));
  CHECK_FALSE(holds(ev, *th, "forall x: object. door(x)"));
}

TEST_CASE("preconditions follow the action precondition axioms") {
  auto cred = testkit::load("door_credential.bat");
  auto door = testkit::load("door.bat");
  Evaluator ev(cred);
  Evaluator plain(door);
  const Situation s0 = Situation::initial();
  CHECK(ev.eval_poss(act("unlock(D, 2)"), s0));
  CHECK_FALSE(plain.eval_poss(act("unlock(D, 2)"), s0));
  CHECK(plain.eval_poss(act("unlock(D, 2)"), sit({"moveTo(D, 1)"})));
  CHECK_FALSE(ev.eval_poss(act("lock(D, 3)"), s0));
  CHECK(ev.eval_poss(act("pressButton(D, E, 3)"), s0));
  CHECK_FALSE(ev.eval_poss(act("pressButton(D, M, 3)"), s0));
  CHECK_THROWS_AS(ev.eval_poss(act("fly(D, 3)"), s0), EvalError);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto trace = testkit::random_trace(rng, {});
    const Situation s = mk_do(trace, s0);
    CHECK(plain.eval_poss(act("moveTo(D, 30)"), s));
    CHECK(plain.eval_poss(act("notify(M, 30)"), s));
  }
}

TEST_CASE("unfolding agrees with progression on short door traces") {
  auto th = testkit::load("door.bat");
  const std::vector<GroundAtom> moves(testkit::door_moves().begin(), testkit::door_moves().end());
  std::vector<std::vector<GroundAction>> frontier{{}};
  for (std::size_t len = 0; len <= 3; ++len) {
    std::vector<std::vector<GroundAction>> next;
    for (const auto& actions : frontier) {
      Trace trace(th, actions);
      Evaluator unfold(trace);
      Progression forward(trace);
      for (const auto& s : trace.prefixes()) {
        for (const auto& x : trace.universe()) {
          for (const char* f : {"open", "locked", "at"})
            CHECK(unfold.eval_fluent({f, {x}}, s) == forward.eval_fluent({f, {x}}, s));
        }
        CHECK(unfold.eval_function({"notifiedManager", {}}, s) == forward.eval_function({"notifiedManager", {}}, s));
      }
      if (len < 3)
        for (const auto& m : moves) {
          auto longer = actions;
          longer.push_back({m.name, m.args, TimePoint{static_cast<std::int64_t>(len + 1)}});
          next.push_back(std::move(longer));
        }
    }
    frontier = std::move(next);
  }
}

TEST_CASE("non-Markovian axioms look at past situations") {
  auto th = std::make_shared<const Theory>(testkit::parse_ok(kHistory));
  const auto actions = acts({"shut(B, 1)", "go(C, 2)", "shut(C, 3)", "shut(C, 4)", "shut(C, 5)"});
  Trace trace(th, actions);
  Evaluator ev(trace);
  Progression forward(trace);
  const auto& p = trace.prefixes();
  CHECK(ev.eval_fluent({"open", {"B"}}, p[0]));
  CHECK_FALSE(ev.eval_fluent({"open", {"B"}}, p[1]));
  CHECK(ev.eval_fluent({"wasOpen", {"B"}}, p[1]));
  CHECK_FALSE(ev.eval_fluent({"wasOpen", {"C"}}, p[1]));
  CHECK(ev.eval_fluent({"wasOpen", {"C"}}, p[2]));
  CHECK(ev.eval_poss(actions[3], p[3]));
  CHECK_FALSE(ev.eval_fluent({"reshut", {"C"}}, p[3]));
  CHECK_FALSE(ev.eval_fluent({"reshut", {"C"}}, p[4]));
  CHECK(ev.eval_fluent({"reshut", {"C"}}, p[5]));
  for (const auto& s : p)
    for (const auto& x : trace.universe())
      for (const char* f : {"open", "wasOpen", "reshut"})
        CHECK(ev.eval_fluent({f, {x}}, s) == forward.eval_fluent({f, {x}}, s));
}

TEST_CASE("Markovian axioms depend only on the current state") {
  auto th = testkit::load("door.bat");
  std::mt19937_64 rng(99);
  const auto state = [&](const Evaluator& ev, const Situation& s) {
    std::vector<bool> bits;
    for (const char* f : {"open", "locked", "at"}) bits.push_back(ev.eval_fluent({f, {"D"}}, s));
    bits.push_back(ev.eval_function({"notifiedManager", {}}, s) == "M");
    return bits;
  };
  Evaluator ev(th, {"D2"});
  std::map<std::vector<bool>, std::vector<Situation>> by_state;
  for (int i = 0; i < 300; ++i) {
    const Situation s = mk_do(testkit::random_trace(rng, {}), Situation::initial());
    by_state[state(ev, s)].push_back(s);
  }
  std::size_t pairs = 0;
  for (const auto& [bits, group] : by_state) {
    for (std::size_t i = 1; i < group.size() && i < 6; ++i) {
      for (const auto& m : testkit::door_moves()) {
        const GroundAction a{m.name, m.args, TimePoint{25}};
        CHECK(state(ev, group[0].then(a)) == state(ev, group[i].then(a)));
        ++pairs;
      }
    }
  }
  CHECK(pairs > 50);
}

TEST_CASE("executability of situations") {
  auto th = testkit::load("door.bat");
  Evaluator ev(th);
  CHECK(executable(ev, Situation::initial()));
  CHECK(executable(ev, sit({"moveTo(D, 1)", "unlock(D, 2)", "lock(D, 30)"})));

  auto cred = testkit::load("door_credential.bat");
  Evaluator ce(cred);
  const auto back = executable_detail(ce, sit({"unlock(D, 10)", "lock(D, 5)"}));
  CHECK_FALSE(back.executable);
  CHECK(back.time_regression == 2u);
  CHECK(back.reason.find("before the start") != std::string::npos);

  const auto impossible = executable_detail(ev, sit({"lock(D, 3)"}));
  CHECK_FALSE(impossible.executable);
  CHECK(impossible.impossible == 1u);

  const CompensationBlock block{1, TimePoint{20}, std::nullopt};
  const Situation late = sit({"moveTo(D, 20)", "notify(M, 25)"});
  CHECK(executable(ev, late));
  const auto blocked = executable_detail(ev, late, std::span(&block, 1));
  CHECK_FALSE(blocked.executable);
  CHECK(blocked.blocked == 2u);
  const Situation early = sit({"moveTo(D, 20)"});
  CHECK(executable(ev, early, std::span(&block, 1)));
  const CompensationBlock resolved{1, TimePoint{20}, 1};
  CHECK(executable(ev, late, std::span(&resolved, 1)));
}

TEST_CASE("executability is prefix closed") {
  auto th = testkit::load("door.bat");
  Evaluator ev(th, {"D2"});
  std::mt19937_64 rng(5);
  std::size_t executable_seen = 0;
  for (int i = 0; i < 2000; ++i) {
    const Situation s = mk_do(testkit::random_trace(rng, {6, 20, false, i % 2 == 0}), Situation::initial());
    if (!executable(ev, s)) continue;
    ++executable_seen;
    for (std::size_t k = 0; k <= s.length(); ++k) CHECK(executable(ev, s.prefix(k)));
  }
  CHECK(executable_seen > 100);
}

TEST_CASE("traces reject undeclared actions") {
  auto th = testkit::load("door.bat");
  CHECK_THROWS_AS(Trace(th, acts({"fly(D, 1)"})), EvalError);
  CHECK_THROWS_AS(Trace(th, acts({"lock(D, E, 1)"})), SortError);
  Trace t(th, acts({"moveTo(D, 1)", "unlock(D, 2)"}));
  CHECK(t.prefix(2).start() == TimePoint{2});
  CHECK(t.index_of(t.prefix(1)) == 1u);
  CHECK_THROWS_AS(t.prefix(3), ContractError);
}
