#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "oblicalc/evaluator.hpp"

namespace oblicalc {

enum class Status : std::uint8_t { Active, Fulfilled, Stopped, Violated, Compensated };
std::string_view status_name(Status s);

/// A live obligation. Positions are prefix indices of the monitored trace.
struct ObligationInstance {
  std::size_t id = 0;
  Formula formula;  // ground, situation-suppressed
  ObligationType type = ObligationType::AchievementNonpreemptive;
  std::string trigger;  // the activating action, or "execComp"
  std::size_t activation = 0;
  TimePoint t1;
  TimePoint t2;
  std::optional<TimePoint> deadline;
  Status status = Status::Active;
  std::optional<std::size_t> end;         // last prefix in force, once closed
  std::optional<std::size_t> stopped_at;  // set when closed by a stopper
  std::vector<std::size_t> witnesses;
  bool from_compensation = false;
  std::vector<std::string> stoppers;
  std::map<std::string, std::string> binding;  // trigger parameters
  std::size_t cursor = 0;                      // next prefix to examine

  bool closed() const { return end.has_value(); }
  bool in_force_at(std::size_t k) const { return activation <= k && (!end || k <= *end); }
};

struct ViolationRecord {
  std::size_t instance = 0;
  Formula formula;
  ObligationType type = ObligationType::AchievementNonpreemptive;
  std::size_t detected_at = 0;  // prefix whose start enables the compensation
  TimePoint enabling_time;
  std::vector<std::size_t> witnesses;

  bool operator==(const ViolationRecord& o) const {
    return instance == o.instance && formula == o.formula && type == o.type && detected_at == o.detected_at &&
           enabling_time == o.enabling_time && witnesses == o.witnesses;
  }
};

struct MonitorOptions {
  /// Stopper actions close instances. Disabling it is a mutation used to
  /// check that the oracle notices a broken monitor.
  bool discharge = true;
};

class ForceProfile;

/// Maintains the obligation store along a growing trace.
class Monitor {
 public:
  explicit Monitor(const Evaluator& ev, MonitorOptions options = {});

  /// Appends one action and updates every instance.
  void advance(const GroundAction& a);
  /// Closes every open window at the end of the trace.
  void finish();

  /// Activates an achievement-nonpreemptive instance at prefix `at` with
  /// window [t1, t2], catching it up to the current end of the trace.
  std::size_t activate(const Formula& phi, std::size_t at, TimePoint t1, TimePoint t2, bool from_compensation);

  const Evaluator& evaluator() const { return ev_; }
  const std::vector<Situation>& prefixes() const { return prefixes_; }
  std::size_t length() const { return prefixes_.size() - 1; }
  const Situation& last() const { return prefixes_.back(); }
  bool finished() const { return finished_; }

  const std::vector<ObligationInstance>& instances() const { return instances_; }
  ObligationInstance& instance(std::size_t id) { return instances_.at(id); }
  const std::vector<ViolationRecord>& violations() const { return violations_; }

  /// Formulas in force at prefix k.
  std::set<Formula> in_force(std::size_t k) const;
  bool oblg(const Formula& phi, std::size_t k) const;

  ForceProfile profile() const;

 private:
  void visit(ObligationInstance& inst, std::size_t j);
  void on_activation(ObligationInstance& inst);
  void close(ObligationInstance& inst, std::size_t end);
  void violate(ObligationInstance& inst, std::size_t detected_at, std::vector<std::size_t> witnesses);
  bool stops(const ObligationInstance& inst, const GroundAction& a) const;
  bool holds(const ObligationInstance& inst, std::size_t k) const;
  std::size_t deadline_prefix(const ObligationInstance& inst, std::size_t upto) const;

  const Evaluator& ev_;
  MonitorOptions options_;
  std::vector<Situation> prefixes_;
  std::vector<ObligationInstance> instances_;
  std::vector<ViolationRecord> violations_;
  bool finished_ = false;
};

/// Force(t) as a step function over prefix start times.
struct ForceAt {
  std::set<Formula> formulas;
  std::optional<std::size_t> prefix;
  std::string note;  // set when no prefix starts exactly at t
};

/// Frozen snapshot of the in-force sets per prefix, with the type
/// classifiers. Classifiers take prefix indices; a missing neighbour at the
/// trace boundary makes its conjunct vacuous.
class ForceProfile {
 public:
  ForceProfile(const Evaluator& ev, std::vector<Situation> prefixes, std::vector<std::set<Formula>> in_force);

  std::size_t size() const { return prefixes_.size(); }
  const Situation& prefix(std::size_t k) const { return prefixes_.at(k); }
  std::optional<std::size_t> index_of(const Situation& s) const;

  const std::set<Formula>& in_force(std::size_t k) const { return in_force_.at(k); }
  bool oblg(const Formula& phi, std::size_t k) const { return in_force(k).count(phi) > 0; }
  bool oblg(const Formula& phi, const Situation& s) const;

  /// Latest prefix with start ≤ t; empty before the epoch.
  ForceAt force(TimePoint t) const;
  /// φ ∈ State(prefix k), i.e. φ[s_k].
  bool state(const Formula& phi, std::size_t k) const { return ev_.holds(phi, prefixes_.at(k)); }
  bool state_at(const Formula& phi, TimePoint t) const;

  bool classify_punctual(const Formula& phi, std::size_t k) const;
  bool classify_persistent(const Formula& phi, std::size_t s1, std::size_t s2) const;
  enum class Achievement : std::uint8_t { Plain, Preemptive, Nonpreemptive };
  bool classify_achievement(const Formula& phi, std::size_t s1, std::size_t s2, Achievement variant) const;
  bool classify_maintenance(const Formula& phi, std::size_t s1, std::size_t s2) const;
  bool classify_perdurant(const Formula& phi, std::size_t s1, std::size_t d, std::size_t s2) const;

 private:
  const Evaluator& ev_;
  std::vector<Situation> prefixes_;
  std::vector<std::set<Formula>> in_force_;
};

/// Violation of a closed instance recomputed from scratch over the
/// monitor's prefixes; agrees with what stepping recorded.
std::optional<ViolationRecord> detect_violation(const Monitor& monitor, const ObligationInstance& inst);

/// Latest prefix in [inst.activation, upto] whose start is at most the deadline.
std::size_t deadline_prefix(const std::vector<Situation>& prefixes, const ObligationInstance& inst, std::size_t upto);

}  // namespace oblicalc
