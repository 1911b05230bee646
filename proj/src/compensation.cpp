#include "oblicalc/compensation.hpp"

#include <algorithm>
#include <tuple>

namespace oblicalc {

namespace {

constexpr std::int64_t kDefaultCompWindow = 10;

}  // namespace

bool is_compensable(const Theory& theory, const Formula& phi) { return !theory.comp(phi).empty(); }

void CompensationState::observe(const Monitor& monitor) {
  const auto& vs = monitor.violations();
  for (; seen < vs.size(); ++seen) {
    const ViolationRecord& v = vs[seen];
    if (!is_compensable(monitor.evaluator().theory(), v.formula)) continue;
    pending.push_back({seen, v.formula, v.enabling_time, v.type, v.detected_at});
  }
}

void CompensationState::refresh(Monitor& monitor) {
  for (auto& ap : applied) {
    if (ap.complete) continue;
    const bool done = std::all_of(ap.instances.begin(), ap.instances.end(), [&](std::size_t id) {
      return monitor.instances()[id].status == Status::Fulfilled;
    });
    if (!done) continue;
    ap.complete = true;
    for (std::size_t id : ap.instances) compensated_pairs.emplace(ap.formula, monitor.instances()[id].formula);
    monitor.instance(monitor.violations()[ap.violation].instance).status = Status::Compensated;
  }
}

std::vector<CompensationBlock> CompensationState::blocks() const {
  std::vector<CompensationBlock> out;
  for (const auto& p : pending) out.push_back({p.detected_at, p.enabling_time, std::nullopt});
  for (const auto& a : applied) out.push_back({a.detected_at, a.enabling_time, a.at});
  std::sort(out.begin(), out.end(), [](const CompensationBlock& x, const CompensationBlock& y) {
    return std::tie(x.detected_at, x.enabling_time) < std::tie(y.detected_at, y.enabling_time);
  });
  return out;
}

bool is_compensated(const CompensationState& state, const Formula& phi) {
  return std::any_of(state.applied.begin(), state.applied.end(),
                     [&](const AppliedCompensation& a) { return a.complete && a.formula == phi; });
}

bool CompWindow::admits(TimePoint t) const {
  switch (disjunct) {
    case ObligationType::Punctual: return t == enabling;
    case ObligationType::AchievementPreemptive:
    case ObligationType::Maintenance: return t <= t2;
    case ObligationType::AchievementNonpreemptive: return t1 <= t && t <= t2;
    case ObligationType::Perdurant: return t1 <= t && t <= *d && *d <= t2;
  }
  return false;
}

CompWindow comp_window(const Monitor& monitor, std::size_t index) {
  const ViolationRecord& v = monitor.violations().at(index);
  const ObligationInstance& inst = monitor.instances()[v.instance];
  const auto& p = monitor.prefixes();
  CompWindow w;
  w.disjunct = v.type;
  w.t1 = p[inst.activation].start();
  w.t2 = p[inst.end.value_or(monitor.length())].start();
  if (v.type == ObligationType::Perdurant) w.d = p[v.detected_at].start();
  w.enabling = v.enabling_time;
  return w;
}

bool poss_exec_comp(const Monitor& monitor, const Formula& phi, TimePoint t) {
  const auto& vs = monitor.violations();
  for (std::size_t i = 0; i < vs.size(); ++i)
    if (vs[i].formula == phi && comp_window(monitor, i).admits(t)) return true;
  return false;
}

ApplyResult apply_compensation(CompensationState& state, Monitor& monitor, const Formula& phi, TimePoint t) {
  ApplyResult r;
  const Theory& theory = monitor.evaluator().theory();
  const std::vector<Formula> comp = theory.comp(phi);
  if (comp.empty()) {
    r.diagnostic = phi.str() + " is not compensable";
    return r;
  }
  state.observe(monitor);
  auto it = std::find_if(state.pending.begin(), state.pending.end(),
                         [&](const PendingCompensation& p) { return p.formula == phi; });
  if (it == state.pending.end()) {
    r.diagnostic = "no pending compensation for " + phi.str();
    return r;
  }
  it = std::find_if(it, state.pending.end(), [&](const PendingCompensation& p) {
    return p.formula == phi && comp_window(monitor, p.violation).admits(t);
  });
  if (it == state.pending.end()) {
    r.diagnostic = "execComp(" + phi.str() + ", " + std::to_string(t.value()) + ") is not possible";
    return r;
  }

  std::size_t at = it->detected_at;
  const auto& p = monitor.prefixes();
  for (std::size_t k = at; k < p.size(); ++k)
    if (p[k].start() <= t) at = k;
  const TimePoint window = theory.comp_window(phi).value_or(TimePoint{kDefaultCompWindow});
  // The window runs from when the violation became observable.
  const TimePoint t2{std::max(t, monitor.last().start()).value() + window.value()};

  AppliedCompensation ap{it->violation, phi, it->enabling_time, it->detected_at, t, at, {}, false};
  for (const Formula& c : comp) ap.instances.push_back(monitor.activate(c, at, t, t2, true));
  state.pending.erase(it);
  r.applied = true;
  r.instances = ap.instances;
  state.applied.push_back(std::move(ap));
  state.refresh(monitor);
  return r;
}

ComplianceRun::ComplianceRun(const Trace& trace, RunOptions options)
    : trace_(trace), options_(options), ev_(trace), monitor_(ev_, MonitorOptions{options.discharge}) {
  for (const GroundAction& a : trace.actions()) {
    monitor_.advance(a);
    settle();
  }
  monitor_.finish();
  settle();
  const auto blocks = state_.blocks();
  exec_ = executable_detail(ev_, trace.last(), blocks);
}

void ComplianceRun::settle() {
  state_.observe(monitor_);
  if (options_.auto_compensate) {
    const auto due = state_.pending;
    for (const auto& p : due) apply_compensation(state_, monitor_, p.formula, p.enabling_time);
  }
  state_.refresh(monitor_);
}

}  // namespace oblicalc
