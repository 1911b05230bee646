#pragma once

// Shared fixtures for the test programs: theory loading, random door traces
// and random obligation declarations.

#include <algorithm>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oblicalc/compensation.hpp"
#include "oblicalc/theory.hpp"

namespace testkit {

using namespace oblicalc;

inline std::string theory_file(const std::string& name) { return std::string(OBLICALC_THEORY_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Parses and validates; throws on any diagnostic.
inline Theory parse_ok(const std::string& text, const std::string& name = "theory") {
  ParseResult r = parse_theory(text, name);
  std::string msg;
  for (const auto& d : r.diagnostics) msg += d.format(name) + "\n";
  if (r.theory)
    for (const auto& d : validate_theory(*r.theory)) msg += d.format(name) + "\n";
  if (!msg.empty() || !r.theory) throw std::runtime_error("theory does not load:\n" + msg);
  return *r.theory;
}

inline std::shared_ptr<const Theory> load(const std::string& name) {
  return std::make_shared<const Theory>(parse_ok(slurp(theory_file(name)), name.substr(0, name.find('.'))));
}

/// The door theory with its obligation declarations replaced by `obligations`.
inline std::shared_ptr<const Theory> door_with(const std::string& obligations) {
  std::string text = slurp(theory_file("door.bat"));
  const std::string from = "obliges unlock";
  const std::string to = "stoppers {lock}.";
  const auto a = text.find(from);
  const auto b = text.find(to, a);
  text.replace(a, b + to.size() - a, obligations);
  return std::make_shared<const Theory>(parse_ok(text, "door"));
}

inline GroundAction act(const std::string& text) { return parse_ground_action(text); }

inline std::vector<GroundAction> acts(std::initializer_list<const char*> texts) {
  std::vector<GroundAction> out;
  for (const char* t : texts) out.push_back(act(t));
  return out;
}

inline Formula phi(const Theory& th, const std::string& text) { return parse_formula(text, th, {}, true); }

/// Untimed door-domain actions used by the random generators.
inline const std::vector<GroundAtom>& door_moves() {
  static const std::vector<GroundAtom> moves{
      {"unlock", {"D"}},       {"lock", {"D"}},  {"moveTo", {"D"}}, {"pressButton", {"D", "E"}},
      {"pressButton", {"D", "M"}}, {"notify", {"M"}}, {"moveTo", {"D2"}},
  };
  return moves;
}

struct TraceShape {
  std::size_t max_length = 6;
  std::int64_t max_time = 20;
  bool strictly_increasing = false;
  bool monotone = true;
};

/// A random trace over door_moves(); times are non-decreasing (or strictly
/// increasing) unless `monotone` is off.
inline std::vector<GroundAction> random_trace(std::mt19937_64& rng, const TraceShape& shape) {
  std::uniform_int_distribution<std::size_t> len(0, shape.max_length);
  const std::size_t n = len(rng);
  std::vector<std::int64_t> times;
  if (shape.strictly_increasing) {
    std::vector<std::int64_t> pool;
    for (std::int64_t t = 1; t <= shape.max_time; ++t) pool.push_back(t);
    std::shuffle(pool.begin(), pool.end(), rng);
    times.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(n, pool.size())));
    std::sort(times.begin(), times.end());
  } else {
    std::uniform_int_distribution<std::int64_t> t(0, shape.max_time);
    for (std::size_t i = 0; i < n; ++i) times.push_back(t(rng));
    if (shape.monotone) std::sort(times.begin(), times.end());
  }
  std::uniform_int_distribution<std::size_t> pick(0, door_moves().size() - 1);
  std::vector<GroundAction> out;
  for (std::int64_t t : times) {
    const GroundAtom& m = door_moves()[pick(rng)];
    out.push_back({m.name, m.args, TimePoint{t}});
  }
  return out;
}

/// The door theory with its obligations replaced by one random declaration
/// and a compensation rule for the obliged formula.
inline std::shared_ptr<const Theory> random_obligation_theory(std::mt19937_64& rng, const Theory& base) {
  static const std::vector<std::string> triggers{"unlock", "lock", "moveTo", "pressButton"};
  static const std::vector<std::string> formulas{"locked(d)", "open(d)", "at(d)", "not locked(d)",
                                                 "locked(d) or open(d)"};
  static const std::vector<ObligationType> types{ObligationType::Punctual, ObligationType::AchievementPreemptive,
                                                 ObligationType::AchievementNonpreemptive,
                                                 ObligationType::Maintenance, ObligationType::Perdurant};
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  Theory th = base;
  ObligationDecl decl;
  decl.trigger = triggers[pick(triggers.size())];
  decl.type = types[pick(types.size())];
  const std::string text = formulas[pick(formulas.size())];
  decl.obliged = parse_formula(text, th, {{"d", Sort::Object}}, true);
  if (decl.type == ObligationType::Punctual) {
    decl.window = TimePoint{0};
  } else {
    decl.window = TimePoint{static_cast<std::int64_t>(2 + pick(14))};
  }
  if (decl.type == ObligationType::Perdurant)
    decl.deadline_offset = TimePoint{static_cast<std::int64_t>(1 + pick(static_cast<std::size_t>(decl.window.value() - 1)))};
  static const std::vector<std::string> stoppers{"lock", "unlock", "moveTo", "notify"};
  if (decl.type != ObligationType::Punctual) {
    decl.stoppers.push_back(stoppers[pick(stoppers.size())]);
    if (pick(2) == 0) decl.stoppers.push_back(stoppers[pick(stoppers.size())]);
  }
  th.obligations = {decl};
  CompensationRule rule;
  rule.pattern = decl.obliged;
  rule.compensations = {parse_formula("notifiedManager() == M", th, {}, true)};
  rule.window = TimePoint{static_cast<std::int64_t>(5 + pick(20))};
  th.compensations = {rule};
  return std::make_shared<const Theory>(std::move(th));
}

}  // namespace testkit
