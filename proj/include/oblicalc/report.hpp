#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oblicalc/compensation.hpp"
#include "oblicalc/oracle.hpp"

namespace oblicalc {

/// FNV-1a 64 over the printed actions, one per line, as 16 hex digits.
std::string trace_digest(const std::vector<GroundAction>& actions);

struct ReportOptions {
  std::optional<TimePoint> at;
};

/// One JSON object per line (header, instances by id, violations,
/// compensations, optional force query, summary), then `# ` footer lines.
std::string compliance_report(const ComplianceRun& run, const ReportOptions& options = {});

/// 0 clean, 1 violations, 3 not executable.
int monitor_exit_code(const ComplianceRun& run);

std::string oracle_report(const std::string& theory_name, const OracleOptions& options, const EquivalenceReport& r);

}  // namespace oblicalc
