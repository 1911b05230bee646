// oblicalc: validate theories, monitor traces, run the possible-worlds oracle.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "oblicalc/compensation.hpp"
#include "oblicalc/oracle.hpp"
#include "oblicalc/report.hpp"

namespace {

using namespace oblicalc;

constexpr int kClean = 0;
constexpr int kFindings = 1;
constexpr int kInputError = 2;

struct InputError {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError{path + ": cannot read file"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

/// Parses and validates; prints diagnostics to stderr.
std::optional<Theory> load_theory(const std::string& path, bool& clean) {
  ParseResult r = parse_theory(read_file(path), stem(path));
  clean = r.diagnostics.empty();
  if (r.theory) {
    auto more = validate_theory(*r.theory);
    clean = clean && more.empty();
    r.diagnostics.insert(r.diagnostics.end(), more.begin(), more.end());
  }
  for (const auto& d : r.diagnostics) std::cerr << d.format(path) << '\n';
  return r.theory;
}

int cmd_validate(const std::string& path) {
  bool clean = false;
  load_theory(path, clean);
  return clean ? kClean : kFindings;
}

int cmd_monitor(const std::string& theory_path, const std::string& trace_path, bool auto_compensate,
                std::optional<std::int64_t> at) {
  bool clean = false;
  auto theory = load_theory(theory_path, clean);
  if (!clean) throw InputError{theory_path + ": theory is not valid"};
  std::vector<GroundAction> actions;
  try {
    actions = parse_trace(read_file(trace_path));
  } catch (const TraceSyntaxError& e) {
    throw InputError{trace_path + ":" + std::to_string(e.line) + ": " + e.what()};
  }
  for (std::size_t i = 0; i < actions.size(); ++i) {
    try {
      theory->check_action(actions[i]);
    } catch (const Error& e) {
      throw InputError{trace_path + ": action " + std::to_string(i + 1) + " " + actions[i].str() + ": " + e.what()};
    }
  }
  Trace trace(*theory, std::move(actions));
  ComplianceRun run(trace, RunOptions{auto_compensate, true});
  ReportOptions ro;
  if (at) ro.at = TimePoint{*at};
  std::cout << compliance_report(run, ro);
  return monitor_exit_code(run);
}

int cmd_oracle(const std::string& theory_path, const OracleOptions& options) {
  bool clean = false;
  auto theory = load_theory(theory_path, clean);
  if (!clean) throw InputError{theory_path + ": theory is not valid"};
  auto shared = std::make_shared<const Theory>(std::move(*theory));
  EquivalenceReport r;
  try {
    r = check_equivalence(shared, options);
  } catch (const BudgetExceeded& e) {
    throw InputError{std::string("budget exceeded: ") + e.what()};
  }
  std::cout << oracle_report(shared->name, options, r);
  return r.ok() ? kClean : kFindings;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Obligation compliance monitor for situation calculus action theories"};
  app.require_subcommand(1);

  std::string theory_path;
  std::string trace_path;

  auto* validate = app.add_subcommand("validate", "Check a theory file");
  validate->add_option("theory", theory_path, "Theory file")->required();

  bool auto_compensate = false;
  std::optional<std::int64_t> at;
  auto* monitor = app.add_subcommand("monitor", "Run the monitor over a trace and print a compliance report");
  monitor->add_option("theory", theory_path, "Theory file")->required();
  monitor->add_option("trace", trace_path, "Trace file, one ground action per line")->required();
  monitor->add_flag("--auto-compensate", auto_compensate, "Apply execComp as soon as a violation is detected");
  monitor->add_option("--at", at, "Also report Force(t)")->check(CLI::NonNegativeNumber);

  OracleOptions oracle_options;
  std::vector<std::int64_t> grid{1, 2, 3};
  auto* oracle = app.add_subcommand("oracle", "Compare the store against the possible-worlds semantics");
  oracle->add_option("theory", theory_path, "Theory file")->required();
  oracle->add_option("--depth", oracle_options.depth, "Maximum situation length")->required();
  oracle->add_option("--times", grid, "Time grid")->delimiter(',')->check(CLI::NonNegativeNumber);
  oracle->add_option("--budget", oracle_options.budget, "Maximum number of situations");
  oracle->add_flag("--executable-only", oracle_options.executable_only, "Only executable situations are worlds");
  oracle->add_flag("--mutate-no-discharge", oracle_options.mutate_no_discharge,
                   "Run a monitor that ignores stopper actions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*validate) return cmd_validate(theory_path);
    if (*monitor) return cmd_monitor(theory_path, trace_path, auto_compensate, at);
    if (*oracle) {
      oracle_options.grid.clear();
      for (auto t : grid) oracle_options.grid.emplace_back(t);
      return cmd_oracle(theory_path, oracle_options);
    }
  } catch (const InputError& e) {
    std::cerr << "oblicalc: " << e.message << '\n';
    return kInputError;
  } catch (const Error& e) {
    std::cerr << "oblicalc: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
