#pragma once

// Property checks shared by the unit tests and the acceptance runner. Each
// returns human-readable counterexamples; an empty result means the property
// held on the given theory and trace.

#include <string>
#include <vector>

#include "oblicalc/compensation.hpp"

namespace properties {

using namespace oblicalc;

inline std::string where(const std::vector<GroundAction>& trace) {
  std::string out = "[";
  for (std::size_t i = 0; i < trace.size(); ++i) out += (i ? ", " : "") + trace[i].str();
  return out + "]";
}

/// How often each lemma's premise held.
struct LemmaStats {
  std::size_t punctual = 0;
  std::size_t punctual_violations = 0;
  std::size_t perdurant = 0;
  std::size_t perdurant_violations = 0;
};

/// Punctual and perdurant force/state properties plus the Force/State
/// correlations, on a trace whose action times strictly increase so that
/// every prefix owns its start time.
inline std::vector<std::string> lemma_counterexamples(const std::shared_ptr<const Theory>& theory,
                                                      const std::vector<GroundAction>& actions,
                                                      LemmaStats* stats = nullptr) {
  LemmaStats local;
  LemmaStats& st = stats ? *stats : local;
  std::vector<std::string> bad;
  Trace trace(theory, actions);
  Evaluator ev(trace);
  Monitor m(ev);
  for (const auto& a : actions) m.advance(a);
  m.finish();
  const ForceProfile prof = m.profile();
  const auto& p = m.prefixes();
  auto fail = [&](const std::string& what) { bad.push_back(what + " on " + where(actions)); };
  auto forced = [&](const Formula& phi, std::size_t k) { return prof.force(p[k].start()).formulas.count(phi) > 0; };

  std::set<Formula> formulas;
  for (const auto& inst : m.instances()) formulas.insert(inst.formula);

  for (const auto& phi : formulas) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      // Store membership and Force at the prefix start agree.
      if (prof.oblg(phi, k) != forced(phi, k)) fail("store and Force differ at prefix " + std::to_string(k) + " for " + phi.str());
      // The state at a prefix is the formula's truth there.
      if (ev.holds(phi, p[k]) != prof.state_at(phi, p[k].start()))
        fail("state differs at prefix " + std::to_string(k) + " for " + phi.str());
      if (prof.classify_punctual(phi, k)) {
        ++st.punctual;
        if (!forced(phi, k)) fail("punctual: not in force at " + std::to_string(k));
        if (k > 0 && forced(phi, k - 1)) fail("punctual: in force before " + std::to_string(k));
        if (k + 1 < p.size() && forced(phi, k + 1)) fail("punctual: in force after " + std::to_string(k));
      }
    }
  }

  for (const auto& v : m.violations()) {
    const ObligationInstance& inst = m.instances()[v.instance];
    if (v.type == ObligationType::Punctual) ++st.punctual_violations;
    if (v.type == ObligationType::Punctual)
      for (std::size_t w : v.witnesses)
        if (prof.state(v.formula, w)) fail("punctual violation: witness " + std::to_string(w) + " satisfies " + v.formula.str());
    if (v.type == ObligationType::Perdurant) {
      ++st.perdurant_violations;
      for (std::size_t k = inst.activation; k <= v.detected_at; ++k) {
        if (!forced(v.formula, k)) fail("perdurant violation: not in force at " + std::to_string(k));
        if (prof.state_at(v.formula, p[k].start())) fail("perdurant violation: state holds at " + std::to_string(k));
      }
    }
  }

  for (const auto& inst : m.instances()) {
    const std::size_t s1 = inst.activation;
    const std::size_t s2 = *inst.end;
    if (inst.type == ObligationType::Perdurant) {
      const std::size_t d = deadline_prefix(p, inst, s2);
      for (std::size_t lo = s1; lo <= d; ++lo)
        for (std::size_t hi = d; hi < p.size(); ++hi)
          if (prof.classify_perdurant(inst.formula, lo, d, hi)) {
            ++st.perdurant;
            for (std::size_t k = d; k <= hi; ++k)
              if (!forced(inst.formula, k)) fail("perdurant: not in force at " + std::to_string(k));
          }
      if (!prof.classify_perdurant(inst.formula, s1, d, s2)) fail("perdurant instance not in force to its end");
    }
    // Stepping and the pure recomputation agree on every instance.
    std::optional<ViolationRecord> recorded;
    for (const auto& v : m.violations())
      if (v.instance == inst.id) recorded = v;
    if (detect_violation(m, inst) != recorded) fail("detect_violation disagrees for instance " + std::to_string(inst.id));
    // Classifier verdicts agree with the instance outcome.
    using A = ForceProfile::Achievement;
    if (inst.type == ObligationType::AchievementNonpreemptive && inst.status == Status::Fulfilled &&
        !prof.classify_achievement(inst.formula, s1, s2, A::Nonpreemptive))
      fail("fulfilled nonpreemptive instance rejected by its classifier");
    if (inst.type == ObligationType::AchievementPreemptive && inst.status == Status::Fulfilled &&
        !prof.classify_achievement(inst.formula, s1, s2, A::Preemptive))
      fail("fulfilled preemptive instance rejected by its classifier");
    if (inst.type == ObligationType::Maintenance &&
        (inst.status == Status::Violated) == prof.classify_maintenance(inst.formula, s1, s2))
      fail("maintenance classifier disagrees with the instance status");
    if (inst.type == ObligationType::Punctual && s1 != s2) fail("punctual instance spans several prefixes");
  }
  return bad;
}

/// The execComp time condition for a violated instance, recomputed from its fields.
inline bool disjunct_admits(const Monitor& m, const ViolationRecord& v, TimePoint t) {
  const ObligationInstance& inst = m.instances()[v.instance];
  const auto& p = m.prefixes();
  const TimePoint t1 = p[inst.activation].start();
  const TimePoint t2 = p[inst.end.value_or(m.length())].start();
  switch (v.type) {
    case ObligationType::Punctual: return t == p[inst.activation].start();
    case ObligationType::AchievementPreemptive:
    case ObligationType::Maintenance: return t <= t2;
    case ObligationType::AchievementNonpreemptive: return t1 <= t && t <= t2;
    case ObligationType::Perdurant: {
      const TimePoint d = p[v.detected_at].start();
      return t1 <= t && t <= d && d <= t2;
    }
  }
  return false;
}

/// The violation and compensation chain. The trace is closed by a late
/// flush action; every violation is compensated at its enabling time and
/// the compensating obligations are then fulfilled by notify(M).
inline std::vector<std::string> chain_counterexamples(const std::shared_ptr<const Theory>& theory,
                                                      std::vector<GroundAction> actions, std::size_t* violations = nullptr) {
  std::vector<std::string> bad;
  auto fail = [&](const std::string& what) { bad.push_back(what + " on " + where(actions)); };
  actions.push_back({"moveTo", {"D"}, TimePoint{100}});
  const std::size_t flushed = actions.size();
  Trace trace(theory, actions);
  Evaluator ev(trace.theory_ptr(), {"D", "D2", "E", "M"});
  Monitor m(ev);
  CompensationState state;
  for (const auto& a : actions) m.advance(a);
  state.observe(m);
  if (violations) *violations += m.violations().size();

  // Report-only: the flush action is ordinary and comes at or after every
  // enabling time, so a pending compensation blocks the trace.
  for (const auto& b : state.blocks()) {
    if (b.detected_at >= flushed) continue;
    const auto report = executable_detail(ev, m.last(), std::span(&b, 1));
    if (report.executable || !report.blocked || *report.blocked > flushed)
      fail("pending compensation at " + std::to_string(b.detected_at) + " does not block");
  }

  for (std::size_t i = 0; i < m.violations().size(); ++i) {
    const ViolationRecord v = m.violations()[i];
    if (!is_compensable(*theory, v.formula)) continue;
    const TimePoint t = v.enabling_time;
    if (!disjunct_admits(m, v, t)) fail("enabling time of " + v.formula.str() + " outside its disjunct");
    if (!poss_exec_comp(m, v.formula, t)) fail("execComp not possible for " + v.formula.str());
  }
  for (std::size_t i = 0; i < m.violations().size(); ++i) {
    const ViolationRecord v = m.violations()[i];
    if (!is_compensable(*theory, v.formula)) continue;
    const ApplyResult r = apply_compensation(state, m, v.formula, v.enabling_time);
    if (!r.applied) fail("apply_compensation refused " + v.formula.str() + ": " + r.diagnostic);
  }
  m.advance({"notify", {"M"}, TimePoint{101}});
  state.refresh(m);
  std::set<Formula> compensated;
  for (const auto& v : m.violations()) {
    if (!is_compensable(*theory, v.formula)) continue;
    if (is_compensated(state, v.formula))
      compensated.insert(v.formula);
    else
      fail("not compensated after notify: " + v.formula.str());
  }
  for (const char* extra : {"unlock", "lock", "moveTo"}) {
    m.advance({extra, {"D"}, TimePoint{102}});
    state.observe(m);
    state.refresh(m);
    for (const auto& phi : compensated)
      if (!is_compensated(state, phi)) fail("compensation of " + phi.str() + " lost after " + extra);
  }
  for (const auto& ap : state.applied)
    for (std::size_t id : ap.instances)
      if (m.instances()[id].status == Status::Violated) fail("a compensating obligation was violated");
  return bad;
}

/// Fluent-by-fluent comparison of unfolding and progression at every prefix.
inline std::size_t unfolding_mismatches(const std::shared_ptr<const Theory>& theory,
                                        const std::vector<GroundAction>& actions, std::size_t* checks = nullptr) {
  Trace trace(theory, actions);
  Evaluator unfold(trace);
  Progression forward(trace);
  std::size_t bad = 0;
  for (const auto& s : trace.prefixes()) {
    for (const auto& f : theory->fluents) {
      if (f.params.size() > 1) continue;
      std::vector<std::vector<std::string>> arg_lists;
      if (f.params.empty()) {
        arg_lists.push_back({});
      } else {
        for (const auto& x : trace.universe()) arg_lists.push_back({x});
      }
      for (const auto& args : arg_lists) {
        const GroundAtom atom{f.name, args};
        const bool same = f.functional ? unfold.eval_function(atom, s) == forward.eval_function(atom, s)
                                       : unfold.eval_fluent(atom, s) == forward.eval_fluent(atom, s);
        if (!same) ++bad;
        if (checks) ++*checks;
      }
    }
  }
  return bad;
}

}  // namespace properties
