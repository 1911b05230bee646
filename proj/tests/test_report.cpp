#include <iomanip>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "oblicalc/report.hpp"
#include "support.hpp"

using namespace oblicalc;
using testkit::acts;
using Json = nlohmann::json;

namespace {

std::vector<Json> records(const std::string& report) {
  std::vector<Json> out;
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] == '{') out.push_back(Json::parse(line));
  return out;
}

std::size_t count(const std::vector<Json>& rs, const std::string& kind) {
  std::size_t n = 0;
  for (const auto& r : rs) n += r["record"] == kind;
  return n;
}

std::string fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) h = (h ^ c) * 0x100000001b3ULL;
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

}  // namespace

TEST_CASE("trace digests") {
  CHECK(trace_digest({}) == "cbf29ce484222325");
  CHECK(fnv1a("a") == "af63dc4c8601ec8c");
  const auto trace = acts({"moveTo(D, 1)", "unlock(D, 2)"});
  CHECK(trace_digest(trace) == fnv1a("moveTo(D, 1)\nunlock(D, 2)\n"));
  CHECK(trace_digest(trace) != trace_digest(acts({"unlock(D, 2)", "moveTo(D, 1)"})));
}

TEST_CASE("the running example reports one fulfilled instance") {
  auto door = testkit::load("door.bat");
  Trace trace(door, acts({"moveTo(D, 1)", "unlock(D, 2)", "lock(D, 30)"}));
  ComplianceRun run(trace);
  const std::string text = compliance_report(run);
  const auto rs = records(text);
  REQUIRE(rs.size() == 3);
  CHECK(rs[0]["record"] == "header");
  CHECK(rs[0]["theory"] == "door");
  CHECK(rs[0]["actions"] == 3);
  CHECK(rs[1]["status"] == "fulfilled");
  CHECK(rs[1]["formula"] == "locked(D)");
  CHECK(rs[1]["t1"] == 2);
  CHECK(rs[1]["t2"] == 32);
  CHECK(rs[2]["violations"] == 0);
  CHECK(rs[2]["executable"] == true);
  CHECK(monitor_exit_code(run) == 0);
  CHECK(text.find("# executable\n") != std::string::npos);
  CHECK(text == compliance_report(ComplianceRun(trace)));
}

TEST_CASE("violations and due compensations are reported") {
  auto door = testkit::load("door.bat");
  Trace trace(door, acts({"moveTo(D, 1)", "unlock(D, 2)"}));
  ComplianceRun run(trace);
  const auto rs = records(compliance_report(run));
  CHECK(count(rs, "instance") == 1);
  CHECK(count(rs, "violation") == 1);
  CHECK(count(rs, "compensation") == 1);
  for (const auto& r : rs)
    if (r["record"] == "compensation") {
      CHECK(r["status"] == "due");
      CHECK(r["compensating"] == Json::array({"notifiedManager() == M"}));
    }
  CHECK(monitor_exit_code(run) == 1);
}

TEST_CASE("a blocked trace is reported as not executable") {
  auto door = testkit::load("door.bat");
  Trace trace(door, acts({"moveTo(D, 1)", "unlock(D, 2)", "moveTo(D, 40)"}));
  ComplianceRun run(trace);
  const std::string text = compliance_report(run);
  CHECK(monitor_exit_code(run) == 3);
  const auto rs = records(text);
  CHECK(rs.back()["executable"] == false);
  CHECK(text.find("# not executable: action 3") != std::string::npos);

  Trace notified(door, acts({"moveTo(D, 1)", "unlock(D, 2)", "moveTo(D, 40)", "notify(M, 45)"}));
  ComplianceRun fixed(notified, {true, true});
  const auto frs = records(compliance_report(fixed));
  CHECK(count(frs, "instance") == 2);
  CHECK(monitor_exit_code(fixed) == 1);
  for (const auto& r : frs)
    if (r["record"] == "compensation") CHECK(r["status"] == "compensated");
}

TEST_CASE("force queries are part of the report") {
  auto door = testkit::load("door.bat");
  Trace trace(door, acts({"moveTo(D, 1)", "unlock(D, 2)", "lock(D, 30)"}));
  ComplianceRun run(trace);
  const auto rs = records(compliance_report(run, {TimePoint{5}}));
  REQUIRE(count(rs, "force") == 1);
  for (const auto& r : rs)
    if (r["record"] == "force") {
      CHECK(r["formulas"] == Json::array({"locked(D)"}));
      CHECK(r["prefix"] == 2);
      CHECK(r["note"].get<std::string>().find("no situation at 5") != std::string::npos);
    }
}

TEST_CASE("oracle reports") {
  auto door = testkit::load("door.bat");
  OracleOptions options;
  options.depth = 2;
  const EquivalenceReport r = check_equivalence(door, options);
  const std::string text = oracle_report("door", options, r);
  const auto rs = records(text);
  CHECK(rs.front()["record"] == "oracle");
  CHECK(rs.back()["worlds"] == r.worlds);
  CHECK(rs.back()["discrepancies"] == 0);
  CHECK(text.find(" 0 discrepancies\n") != std::string::npos);
  CHECK(text == oracle_report("door", options, check_equivalence(door, options)));
}
