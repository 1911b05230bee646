#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("oblicalc_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

Outcome run(const std::string& args) {
  const std::string out = (scratch() / "stdout").string();
  const std::string err = (scratch() / "stderr").string();
  const std::string cmd = std::string(OBLICALC_BINARY) + " " + args + " >" + out + " 2>" + err;
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = testkit::slurp(out);
  o.err = testkit::slurp(err);
  return o;
}

std::string door() { return testkit::theory_file("door.bat"); }

}  // namespace

TEST_CASE("validate") {
  CHECK(run("validate " + door()).code == 0);
  CHECK(run("validate " + testkit::theory_file("door_credential.bat")).code == 0);

  const std::string bad = write("poss.bat", "action go(t: time)\n  poss: true.\naction stop(t: time)\n  poss: Poss(go(t), s).\n");
  const Outcome o = run("validate " + bad);
  CHECK(o.code == 1);
  CHECK(o.err.find("poss.bat:4:") != std::string::npos);
  CHECK(o.err.find("Poss in APA body") != std::string::npos);

  const Outcome missing = run("validate " + (scratch() / "absent.bat").string());
  CHECK(missing.code == 2);
  CHECK(missing.err.rfind("oblicalc: ", 0) == 0);

  CHECK(run("validate " + write("syntax.bat", "action go(t: time\n")).code == 1);
  CHECK(run("validate").code == 2);
  CHECK(run("frobnicate").code == 2);
}

TEST_CASE("monitor exit codes") {
  const Outcome ok = run("monitor " + door() + " " + write("ok.trace", "moveTo(D, 1)\nunlock(D, 2)\nlock(D, 30)\n"));
  CHECK(ok.code == 0);
  CHECK(ok.out.find("\"status\":\"fulfilled\"") != std::string::npos);

  const std::string late = write("late.trace", "moveTo(D, 1)\nunlock(D, 2)\n");
  const Outcome violated = run("monitor " + door() + " " + late);
  CHECK(violated.code == 1);
  CHECK(violated.out.find("\"record\":\"violation\"") != std::string::npos);

  const std::string blocked = write("blocked.trace", "moveTo(D, 1)\nunlock(D, 2)\nmoveTo(D, 40)\n");
  CHECK(run("monitor " + door() + " " + blocked).code == 3);

  const std::string notified = write("notified.trace", "moveTo(D, 1)\nunlock(D, 2)\nmoveTo(D, 40)\nnotify(M, 45)\n");
  const Outcome comp = run("monitor " + door() + " " + notified + " --auto-compensate");
  CHECK(comp.code == 1);
  CHECK(comp.out.find("\"status\":\"compensated\"") != std::string::npos);

  CHECK(run("monitor " + door() + " " + write("empty.trace", "")).code == 0);
  CHECK(run("monitor " + door() + " " + write("back.trace", "moveTo(D, 5)\nmoveTo(D, 2)\n")).code == 3);

  const Outcome malformed = run("monitor " + door() + " " + write("bad.trace", "moveTo(D, 1)\nunlock(D\n"));
  CHECK(malformed.code == 2);
  CHECK(malformed.err.find("2") != std::string::npos);
  CHECK(run("monitor " + door() + " " + write("undeclared.trace", "fly(D, 1)\n")).code == 2);
  CHECK(run("monitor " + door() + " " + (scratch() / "none.trace").string()).code == 2);
}

TEST_CASE("monitor force queries") {
  const std::string t = write("force.trace", "unlock(D, 10)\n");
  const Outcome o = run("monitor " + testkit::theory_file("door_credential.bat") + " " + t + " --at 10");
  CHECK(o.out.find("\"record\":\"force\",\"t\":10,\"prefix\":1,\"formulas\":[\"locked(D)\"]") != std::string::npos);
  const Outcome before = run("monitor " + door() + " " + t + " --at 9");
  CHECK(before.out.find("\"formulas\":[]") != std::string::npos);
  CHECK(before.out.find("no situation at 9") != std::string::npos);
}

TEST_CASE("reports are byte-identical across runs") {
  const std::string t = write("repeat.trace", "moveTo(D, 1)\nunlock(D, 2)\npressButton(D, E, 5)\nmoveTo(D, 40)\n");
  const Outcome a = run("monitor " + door() + " " + t + " --at 5");
  const Outcome b = run("monitor " + door() + " " + t + " --at 5");
  CHECK(a.code == b.code);
  CHECK(a.out == b.out);
  CHECK_FALSE(a.out.empty());
  const Outcome c = run("oracle " + door() + " --depth 2");
  CHECK(c.out == run("oracle " + door() + " --depth 2").out);
}

TEST_CASE("oracle") {
  const Outcome ok = run("oracle " + door() + " --depth 3");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("\"discrepancies\":0") != std::string::npos);
  CHECK(run("oracle " + door() + " --depth 12").code == 2);
  CHECK(run("oracle " + door() + " --depth 3 --budget 50").code == 2);
  const Outcome mutated = run("oracle " + door() + " --depth 3 --mutate-no-discharge");
  CHECK(mutated.code == 1);
  CHECK(mutated.out.find("\"record\":\"discrepancy\"") != std::string::npos);
  CHECK(run("oracle " + door() + " --depth 2 --times 1,5 --executable-only").code == 0);
}
