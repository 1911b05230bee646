#include "oblicalc/report.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace oblicalc {

namespace {

using Json = nlohmann::ordered_json;

Json opt(const std::optional<std::size_t>& v) { return v ? Json(*v) : Json(nullptr); }
Json opt(const std::optional<TimePoint>& v) { return v ? Json(v->value()) : Json(nullptr); }

std::string plural(std::size_t n, const std::string& word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

}  // namespace

std::string trace_digest(const std::vector<GroundAction>& actions) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const auto& a : actions) {
    for (unsigned char c : a.str() + "\n") {
      h ^= c;
      h *= 1099511628211ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string compliance_report(const ComplianceRun& run, const ReportOptions& options) {
  const Monitor& m = run.monitor();
  const Theory& theory = run.trace().theory();
  const auto& comp = run.compensation();
  std::ostringstream out;

  out << Json{{"record", "header"},
              {"theory", theory.name},
              {"trace_digest", trace_digest(run.trace().actions())},
              {"actions", run.trace().size()},
              {"auto_compensate", run.options().auto_compensate}}
             .dump()
      << '\n';

  for (const auto& inst : m.instances()) {
    out << Json{{"record", "instance"},
                {"id", inst.id},
                {"formula", inst.formula.str()},
                {"type", obligation_type_name(inst.type)},
                {"trigger", inst.trigger},
                {"t1", inst.t1.value()},
                {"t2", inst.t2.value()},
                {"deadline", opt(inst.deadline)},
                {"activation", inst.activation},
                {"end", opt(inst.end)},
                {"stopped_at", opt(inst.stopped_at)},
                {"status", status_name(inst.status)},
                {"witnesses", inst.witnesses},
                {"compensation", inst.from_compensation}}
               .dump()
        << '\n';
  }

  for (const auto& v : m.violations()) {
    out << Json{{"record", "violation"},
                {"instance", v.instance},
                {"formula", v.formula.str()},
                {"type", obligation_type_name(v.type)},
                {"detected_at", v.detected_at},
                {"enabling_time", v.enabling_time.value()},
                {"witnesses", v.witnesses}}
               .dump()
        << '\n';
  }

  auto names = [](const std::vector<Formula>& fs) {
    std::vector<std::string> out;
    for (const auto& f : fs) out.push_back(f.str());
    return out;
  };
  for (const auto& p : comp.pending) {
    out << Json{{"record", "compensation"},
                {"violation", p.violation},
                {"violated", p.formula.str()},
                {"enabling_time", p.enabling_time.value()},
                {"compensating", names(theory.comp(p.formula))},
                {"instances", Json::array()},
                {"status", "due"}}
               .dump()
        << '\n';
  }
  for (const auto& a : comp.applied) {
    out << Json{{"record", "compensation"},
                {"violation", a.violation},
                {"violated", a.formula.str()},
                {"enabling_time", a.enabling_time.value()},
                {"compensating", names(theory.comp(a.formula))},
                {"instances", a.instances},
                {"status", a.complete ? "compensated" : "applied"}}
               .dump()
        << '\n';
  }

  std::optional<ForceAt> force;
  if (options.at) {
    force = m.profile().force(*options.at);
    std::vector<std::string> fs;
    for (const auto& f : force->formulas) fs.push_back(f.str());
    out << Json{{"record", "force"},
                {"t", options.at->value()},
                {"prefix", opt(force->prefix)},
                {"formulas", fs},
                {"note", force->note.empty() ? Json(nullptr) : Json(force->note)}}
               .dump()
        << '\n';
  }

  const auto& ex = run.executability();
  out << Json{{"record", "summary"},
              {"instances", m.instances().size()},
              {"violations", m.violations().size()},
              {"compensations_due", comp.pending.size()},
              {"compensations_applied", comp.applied.size()},
              {"executable", ex.executable},
              {"reason", ex.executable ? Json(nullptr) : Json(ex.reason)}}
             .dump()
      << '\n';

  out << "# theory " << theory.name << ", trace " << trace_digest(run.trace().actions()) << ", "
      << plural(run.trace().size(), "action") << '\n';
  out << "# " << plural(m.instances().size(), "instance") << ", " << plural(m.violations().size(), "violation")
      << ", " << comp.pending.size() << " compensation" << (comp.pending.size() == 1 ? "" : "s") << " due, "
      << comp.applied.size() << " applied\n";
  for (const auto& inst : m.instances())
    out << "#   [" << inst.id << "] " << inst.formula.str() << " " << obligation_type_name(inst.type) << " ["
        << inst.t1.value() << ", " << inst.t2.value() << "] " << status_name(inst.status) << '\n';
  if (force) {
    out << "# Force(" << options.at->value() << ") = {";
    bool first = true;
    for (const auto& f : force->formulas) {
      out << (first ? "" : ", ") << f.str();
      first = false;
    }
    out << "}" << (force->note.empty() ? "" : "  (" + force->note + ")") << '\n';
  }
  out << "# " << (ex.executable ? "executable" : "not executable: " + ex.reason) << '\n';
  return out.str();
}

int monitor_exit_code(const ComplianceRun& run) {
  if (!run.executability().executable) return 3;
  return run.monitor().violations().empty() ? 0 : 1;
}

std::string oracle_report(const std::string& theory_name, const OracleOptions& options, const EquivalenceReport& r) {
  std::ostringstream out;
  std::vector<std::int64_t> grid;
  for (auto t : options.grid) grid.push_back(t.value());
  out << Json{{"record", "oracle"},
              {"theory", theory_name},
              {"depth", options.depth},
              {"grid", grid},
              {"executable_only", options.executable_only},
              {"mutate_no_discharge", options.mutate_no_discharge}}
             .dump()
      << '\n';
  for (const auto& d : r.discrepancies) {
    out << Json{{"record", "discrepancy"},
                {"situation", d.situation.str()},
                {"formula", d.formula},
                {"monitor", d.monitor},
                {"modal", d.modal}}
               .dump()
        << '\n';
  }
  out << Json{{"record", "summary"},
              {"worlds", r.worlds},
              {"checks", r.checks},
              {"unsatisfiable", r.unsatisfiable},
              {"discrepancies", r.discrepancies.size()}}
             .dump()
      << '\n';
  out << "# " << plural(r.worlds, "world") << ", " << plural(r.checks, "check") << ", "
      << r.discrepancies.size()
      << (r.discrepancies.size() == 1 ? " discrepancy" : " discrepancies") << '\n';
  return out.str();
}

}  // namespace oblicalc
