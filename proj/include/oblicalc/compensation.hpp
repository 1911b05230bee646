#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "oblicalc/monitor.hpp"

namespace oblicalc {

/// A violation waiting for its execComp.
struct PendingCompensation {
  std::size_t violation = 0;  // index into Monitor::violations()
  Formula formula;
  TimePoint enabling_time;
  ObligationType disjunct = ObligationType::AchievementNonpreemptive;
  std::size_t detected_at = 0;
};

struct AppliedCompensation {
  std::size_t violation = 0;
  Formula formula;
  TimePoint enabling_time;
  std::size_t detected_at = 0;
  TimePoint time;
  std::size_t at = 0;  // prefix where the compensating instances start
  std::vector<std::size_t> instances;
  bool complete = false;
};

struct CompensationState {
  std::vector<PendingCompensation> pending;
  std::vector<AppliedCompensation> applied;
  std::set<std::pair<Formula, Formula>> compensated_pairs;
  std::size_t seen = 0;  // violations already examined

  /// Registers new compensable violations of `monitor` as pending.
  void observe(const Monitor& monitor);
  /// Records finished compensations and marks their violated instances.
  void refresh(Monitor& monitor);

  /// One block per compensable violation, resolved where it was applied.
  std::vector<CompensationBlock> blocks() const;
};

bool is_compensable(const Theory& theory, const Formula& phi);

/// φ violated and every compensating obligation activated and fulfilled.
bool is_compensated(const CompensationState& state, const Formula& phi);

/// The times at which execComp may compensate one violation.
struct CompWindow {
  ObligationType disjunct = ObligationType::Punctual;
  TimePoint t1;
  TimePoint t2;
  std::optional<TimePoint> d;
  TimePoint enabling;
  bool admits(TimePoint t) const;
};

/// Bounds for violation `index` of the monitor; an instance still open is
/// bounded by the current end of the trace.
CompWindow comp_window(const Monitor& monitor, std::size_t index);

bool poss_exec_comp(const Monitor& monitor, const Formula& phi, TimePoint t);

struct ApplyResult {
  bool applied = false;
  std::string diagnostic;
  std::vector<std::size_t> instances;
};

/// Activates Comp(φ) at time t against the oldest pending violation of φ.
ApplyResult apply_compensation(CompensationState& state, Monitor& monitor, const Formula& phi, TimePoint t);

struct RunOptions {
  bool auto_compensate = false;
  bool discharge = true;
};

/// Monitor, compensation state and executability verdict for one trace.
class ComplianceRun {
 public:
  ComplianceRun(const Trace& trace, RunOptions options = {});

  const Trace& trace() const { return trace_; }
  const Evaluator& evaluator() const { return ev_; }
  const Monitor& monitor() const { return monitor_; }
  const CompensationState& compensation() const { return state_; }
  const ExecutabilityReport& executability() const { return exec_; }
  const RunOptions& options() const { return options_; }

 private:
  void settle();

  const Trace& trace_;
  RunOptions options_;
  Evaluator ev_;
  Monitor monitor_;
  CompensationState state_;
  ExecutabilityReport exec_;
};

}  // namespace oblicalc
