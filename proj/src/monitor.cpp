#include "oblicalc/monitor.hpp"

#include <algorithm>

namespace oblicalc {

std::string_view status_name(Status s) {
  switch (s) {
    case Status::Active: return "active";
    case Status::Fulfilled: return "fulfilled";
    case Status::Stopped: return "stopped";
    case Status::Violated: return "violated";
    case Status::Compensated: return "compensated";
  }
  return "?";
}

std::size_t deadline_prefix(const std::vector<Situation>& prefixes, const ObligationInstance& inst, std::size_t upto) {
  if (!inst.deadline) throw ContractError("instance " + std::to_string(inst.id) + " has no deadline");
  for (std::size_t k = upto + 1; k-- > inst.activation;)
    if (prefixes[k].start() <= *inst.deadline) return k;
  return inst.activation;
}

// ---------------------------------------------------------------------------
// Monitor

Monitor::Monitor(const Evaluator& ev, MonitorOptions options) : ev_(ev), options_(options) {
  prefixes_.push_back(Situation::initial(ev.theory().epoch));
}

bool Monitor::holds(const ObligationInstance& inst, std::size_t k) const { return ev_.holds(inst.formula, prefixes_[k]); }

std::size_t Monitor::deadline_prefix(const ObligationInstance& inst, std::size_t upto) const {
  return oblicalc::deadline_prefix(prefixes_, inst, upto);
}

bool Monitor::stops(const ObligationInstance& inst, const GroundAction& a) const {
  if (std::find(inst.stoppers.begin(), inst.stoppers.end(), a.functor) == inst.stoppers.end()) return false;
  const ActionDecl* decl = ev_.theory().find_action(a.functor);
  if (!decl) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    auto it = inst.binding.find(decl->sig.params[i].name);
    if (it != inst.binding.end() && it->second != a.args[i]) return false;
  }
  return true;
}

void Monitor::violate(ObligationInstance& inst, std::size_t detected_at, std::vector<std::size_t> witnesses) {
  inst.status = Status::Violated;
  inst.witnesses = witnesses;
  violations_.push_back(
      {inst.id, inst.formula, inst.type, detected_at, prefixes_[detected_at].start(), std::move(witnesses)});
}

namespace {

std::vector<std::size_t> range(std::size_t from, std::size_t to) {
  std::vector<std::size_t> out;
  for (std::size_t k = from; k <= to; ++k) out.push_back(k);
  return out;
}

}  // namespace

void Monitor::close(ObligationInstance& inst, std::size_t end) {
  inst.end = end;
  if (inst.status != Status::Active) return;
  if (inst.from_compensation) {
    inst.status = Status::Stopped;
    return;
  }
  switch (inst.type) {
    case ObligationType::Punctual: break;
    case ObligationType::AchievementPreemptive: violate(inst, end, range(0, end)); break;
    case ObligationType::AchievementNonpreemptive: violate(inst, end, range(inst.activation, end)); break;
    case ObligationType::Maintenance: inst.status = Status::Fulfilled; break;
    case ObligationType::Perdurant: {
      const std::size_t d = deadline_prefix(inst, end);
      violate(inst, d, range(inst.activation, d));
      break;
    }
  }
}

void Monitor::on_activation(ObligationInstance& inst) {
  const std::size_t j = inst.activation;
  switch (inst.type) {
    case ObligationType::Punctual:
      inst.end = j;
      if (holds(inst, j)) {
        inst.status = Status::Fulfilled;
        inst.witnesses = {j};
      } else {
        violate(inst, j, {j});
      }
      break;
    case ObligationType::AchievementPreemptive:
      for (std::size_t k = 0; k <= j; ++k) {
        if (holds(inst, k)) {
          inst.status = Status::Fulfilled;
          inst.witnesses = {k};
          break;
        }
      }
      break;
    case ObligationType::AchievementNonpreemptive:
    case ObligationType::Perdurant:
      if (holds(inst, j)) {
        inst.status = Status::Fulfilled;
        inst.witnesses = {j};
      }
      break;
    case ObligationType::Maintenance:
      if (!holds(inst, j)) violate(inst, j, {j});
      break;
  }
}

void Monitor::visit(ObligationInstance& inst, std::size_t j) {
  inst.cursor = j + 1;
  if (inst.closed()) return;
  if (j == inst.activation) {
    on_activation(inst);
    return;
  }
  const TimePoint start = prefixes_[j].start();
  if (start > inst.t2) {
    close(inst, j - 1);
    return;
  }
  const bool active = inst.status == Status::Active;
  if (inst.type == ObligationType::Perdurant && active && !inst.from_compensation && start > *inst.deadline) {
    const std::size_t d = deadline_prefix(inst, j - 1);
    violate(inst, d, range(inst.activation, d));
  }
  if (inst.status == Status::Active) {
    switch (inst.type) {
      case ObligationType::AchievementPreemptive:
      case ObligationType::AchievementNonpreemptive:
        if (holds(inst, j)) {
          inst.status = Status::Fulfilled;
          inst.witnesses = {j};
        }
        break;
      case ObligationType::Maintenance:
        if (!holds(inst, j)) violate(inst, j, {j});
        break;
      case ObligationType::Perdurant:
        if (start <= *inst.deadline && holds(inst, j)) {
          inst.status = Status::Fulfilled;
          inst.witnesses = {j};
        }
        break;
      case ObligationType::Punctual: break;
    }
  }
  if (options_.discharge && stops(inst, prefixes_[j].last_action())) {
    inst.stopped_at = j;
    inst.end = j;
    if (inst.status == Status::Active) inst.status = Status::Stopped;
  }
}

void Monitor::advance(const GroundAction& a) {
  if (finished_) throw ContractError("monitor already finished");
  ev_.theory().check_action(a);
  prefixes_.push_back(last().then(a));
  const std::size_t j = length();
  for (auto& inst : instances_)
    if (inst.cursor <= j) visit(inst, j);

  const ActionDecl* trig = ev_.theory().find_action(a.functor);
  for (const auto& decl : ev_.theory().obligations) {
    if (decl.trigger != a.functor) continue;
    ObligationInstance inst;
    inst.id = instances_.size();
    std::map<std::string, Term> subst;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      inst.binding[trig->sig.params[i].name] = a.args[i];
      subst.emplace(trig->sig.params[i].name, Term::constant(a.args[i]));
    }
    inst.formula = substitute(decl.obliged, subst);
    inst.type = decl.type;
    inst.trigger = a.str();
    inst.activation = j;
    inst.t1 = a.time;
    inst.t2 = TimePoint{a.time.value() + decl.window.value()};
    if (decl.deadline_offset) inst.deadline = TimePoint{a.time.value() + decl.deadline_offset->value()};
    inst.stoppers = decl.stoppers;
    instances_.push_back(std::move(inst));
    visit(instances_.back(), j);
  }
}

std::size_t Monitor::activate(const Formula& phi, std::size_t at, TimePoint t1, TimePoint t2, bool from_compensation) {
  if (at > length()) throw ContractError("activation point beyond the trace");
  if (!phi.is_ground() || !is_situation_suppressed(phi))
    throw ContractError("obligations must be ground and situation-suppressed: " + phi.str());
  ObligationInstance inst;
  inst.id = instances_.size();
  inst.formula = phi;
  inst.type = ObligationType::AchievementNonpreemptive;
  inst.trigger = "execComp";
  inst.activation = at;
  inst.t1 = t1;
  inst.t2 = t2;
  inst.from_compensation = from_compensation;
  inst.cursor = at;
  instances_.push_back(std::move(inst));
  ObligationInstance& added = instances_.back();
  for (std::size_t j = at; j <= length(); ++j) visit(added, j);
  if (finished_ && !added.closed()) close(added, length());
  return added.id;
}

void Monitor::finish() {
  if (finished_) return;
  for (auto& inst : instances_)
    if (!inst.closed()) close(inst, length());
  finished_ = true;
}

std::set<Formula> Monitor::in_force(std::size_t k) const {
  std::set<Formula> out;
  for (const auto& inst : instances_)
    if (inst.in_force_at(k)) out.insert(inst.formula);
  return out;
}

bool Monitor::oblg(const Formula& phi, std::size_t k) const {
  for (const auto& inst : instances_)
    if (inst.in_force_at(k) && inst.formula == phi) return true;
  return false;
}

ForceProfile Monitor::profile() const {
  std::vector<std::set<Formula>> sets;
  for (std::size_t k = 0; k <= length(); ++k) sets.push_back(in_force(k));
  return ForceProfile(ev_, prefixes_, std::move(sets));
}

// ---------------------------------------------------------------------------
// Pure violation check

std::optional<ViolationRecord> detect_violation(const Monitor& monitor, const ObligationInstance& inst) {
  if (!inst.closed()) throw ContractError("instance " + std::to_string(inst.id) + " is still open");
  if (inst.from_compensation) return std::nullopt;
  const auto& p = monitor.prefixes();
  const Evaluator& ev = monitor.evaluator();
  const std::size_t s1 = inst.activation;
  const std::size_t s2 = *inst.end;
  auto holds = [&](std::size_t k) { return ev.holds(inst.formula, p[k]); };
  auto any = [&](std::size_t from, std::size_t to) {
    for (std::size_t k = from; k <= to; ++k)
      if (holds(k)) return true;
    return false;
  };
  auto record = [&](std::size_t at, std::vector<std::size_t> witnesses) {
    return ViolationRecord{inst.id, inst.formula, inst.type, at, p[at].start(), std::move(witnesses)};
  };
  switch (inst.type) {
    case ObligationType::Punctual:
      if (holds(s1)) return std::nullopt;
      return record(s1, {s1});
    case ObligationType::AchievementPreemptive:
      if (any(0, s2) || inst.stopped_at) return std::nullopt;
      return record(s2, range(0, s2));
    case ObligationType::AchievementNonpreemptive:
      if (any(s1, s2) || inst.stopped_at) return std::nullopt;
      return record(s2, range(s1, s2));
    case ObligationType::Maintenance:
      for (std::size_t k = s1; k <= s2; ++k)
        if (!holds(k)) return record(k, {k});
      return std::nullopt;
    case ObligationType::Perdurant: {
      std::optional<std::size_t> passed;
      for (std::size_t k = s1 + 1; k <= s2 && !passed; ++k)
        if (p[k].start() > *inst.deadline) passed = k;
      const std::size_t region_end = passed ? *passed - 1 : s2;
      if (any(s1, region_end)) return std::nullopt;
      if (!passed && inst.stopped_at) return std::nullopt;
      const std::size_t d = deadline_prefix(p, inst, region_end);
      return record(d, range(s1, d));
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// ForceProfile

ForceProfile::ForceProfile(const Evaluator& ev, std::vector<Situation> prefixes, std::vector<std::set<Formula>> in_force)
    : ev_(ev), prefixes_(std::move(prefixes)), in_force_(std::move(in_force)) {
  if (prefixes_.size() != in_force_.size()) throw ContractError("one in-force set per prefix is required");
}

std::optional<std::size_t> ForceProfile::index_of(const Situation& s) const {
  const std::size_t k = s.length();
  if (k < prefixes_.size() && prefixes_[k] == s) return k;
  return std::nullopt;
}

bool ForceProfile::oblg(const Formula& phi, const Situation& s) const {
  auto k = index_of(s);
  if (!k) throw ContractError(s.str() + " is not a prefix of the monitored trace");
  return oblg(phi, *k);
}

ForceAt ForceProfile::force(TimePoint t) const {
  ForceAt out;
  if (t < prefixes_.front().epoch()) {
    out.note = "no situation at " + std::to_string(t.value()) + ": before the epoch";
    return out;
  }
  bool exact = false;
  for (std::size_t k = 0; k < prefixes_.size(); ++k) {
    if (prefixes_[k].start() <= t) out.prefix = k;
    if (prefixes_[k].start() == t) exact = true;
  }
  if (!out.prefix) {
    out.note = "no situation at " + std::to_string(t.value());
    return out;
  }
  out.formulas = in_force_[*out.prefix];
  if (!exact)
    out.note = "no situation at " + std::to_string(t.value()) + "; using prefix " + std::to_string(*out.prefix);
  return out;
}

bool ForceProfile::state_at(const Formula& phi, TimePoint t) const {
  const ForceAt f = force(t);
  return f.prefix && state(phi, *f.prefix);
}

namespace {

void check_interval(std::size_t s1, std::size_t s2, std::size_t size) {
  if (s1 > s2) throw ContractError("interval start " + std::to_string(s1) + " is after its end " + std::to_string(s2));
  if (s2 >= size) throw ContractError("prefix " + std::to_string(s2) + " is beyond the trace");
}

}  // namespace

bool ForceProfile::classify_punctual(const Formula& phi, std::size_t k) const {
  check_interval(k, k, size());
  return oblg(phi, k) && (k == 0 || !oblg(phi, k - 1)) && (k + 1 == size() || !oblg(phi, k + 1));
}

bool ForceProfile::classify_persistent(const Formula& phi, std::size_t s1, std::size_t s2) const {
  check_interval(s1, s2, size());
  for (std::size_t k = s1; k <= s2; ++k)
    if (!oblg(phi, k)) return false;
  return (s1 == 0 || !oblg(phi, s1 - 1)) && (s2 + 1 == size() || !oblg(phi, s2 + 1));
}

bool ForceProfile::classify_achievement(const Formula& phi, std::size_t s1, std::size_t s2, Achievement variant) const {
  check_interval(s1, s2, size());
  for (std::size_t k = s1; k <= s2; ++k)
    if (!oblg(phi, k)) return false;
  if (variant == Achievement::Plain) return true;
  const std::size_t from = variant == Achievement::Preemptive ? 0 : s1;
  for (std::size_t k = from; k <= s2; ++k)
    if (state(phi, k)) return true;
  return false;
}

bool ForceProfile::classify_maintenance(const Formula& phi, std::size_t s1, std::size_t s2) const {
  check_interval(s1, s2, size());
  for (std::size_t k = s1; k <= s2; ++k)
    if (!oblg(phi, k) || !state(phi, k)) return false;
  return true;
}

bool ForceProfile::classify_perdurant(const Formula& phi, std::size_t s1, std::size_t d, std::size_t s2) const {
  check_interval(s1, d, size());
  check_interval(d, s2, size());
  for (std::size_t k = d; k <= s2; ++k)
    if (!oblg(phi, k)) return false;
  return true;
}

}  // namespace oblicalc
