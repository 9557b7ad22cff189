#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#ifdef MPL_CLI_PATH

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(MPL_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  int status = pclose(pipe);
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, out};
}

const fs::path& work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "mpl-cli-tests";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string file_with(const std::string& name, const std::string& text) {
  fs::path p = work_dir() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string one_agent_interp() {
  static std::string path = file_with("one.json", R"({
    "agents": 1,
    "sorts": {"x": {"int": [0, 2]}, "u": {"int": [0, 3]}},
    "outcome": {"int": [0, 2]},
    "preferences": {"1": {"utility": [{"then": "outcome"}]}}
  })");
  return path;
}

}  // namespace

TEST_CASE("cli: the bundled corpus passes") {
  auto r = run("corpus --format json");
  CHECK(r.code == 0);
  auto doc = nlohmann::json::parse(r.out);
  REQUIRE(doc.contains("entries"));
  CHECK(doc["entries"].size() >= 10);
  for (const auto& e : doc["entries"]) CHECK(e["pass"] == true);
}

TEST_CASE("cli: verify maps verdicts to exit codes") {
  std::string base = "verify --mech 'ch {1} (x)' --post 'outcome = x' --interp " +
                     one_agent_interp() + " --format json";

  auto valid = run(base + " --pre 'outcome = 2'");
  CHECK(valid.code == 0);
  auto vdoc = nlohmann::json::parse(valid.out);
  CHECK(vdoc["verdict"] == "valid");
  CHECK(vdoc["capped"] == false);
  CHECK(vdoc["witness"]["fully_subgame_perfect"] == true);

  auto invalid = run(base + " --pre 'outcome = 0'");
  CHECK(invalid.code == 1);
  auto idoc = nlohmann::json::parse(invalid.out);
  CHECK(idoc["verdict"] == "invalid");
  CHECK(idoc["counterexample"]["outcome"] == 0);

  std::string capped = "verify --mech 'while x < 2 do ch {1} (u); x := x + u od' "
                       "--pre 'outcome = 1' --post 'outcome = 1' --interp " +
                       one_agent_interp() + " --cap 6";
  auto inexact = run(capped);
  CHECK(inexact.code == 2);
  CHECK(inexact.out.find("inexact") != std::string::npos);

  auto strict = run(capped + " --strict");
  CHECK(strict.code == 2);
  CHECK(strict.out.find("inexact") != std::string::npos);
}

TEST_CASE("cli: input problems exit with status 3") {
  auto missing = run("verify --mech /no/such/file.mpl --pre true --post true "
                     "--interp " + one_agent_interp());
  CHECK(missing.code == 3);

  auto broken = file_with("broken.mpl", "x := := 1");
  auto parse = run("verify --mech " + broken + " --pre true --post true --interp " +
                   one_agent_interp());
  CHECK(parse.code == 3);
  CHECK(parse.out.find("line") != std::string::npos);

  auto badcap = run("verify --mech 'x := 1' --pre true --post true --interp " +
                    one_agent_interp() + " --cap 1");
  CHECK(badcap.code == 3);
}

TEST_CASE("cli: tree prints a dot graph") {
  auto r = run("tree --mech 'x := 1' --interp " + one_agent_interp());
  CHECK(r.code == 0);
  CHECK(r.out.find("digraph") != std::string::npos);
  CHECK(r.out.find("->") != std::string::npos);
}

TEST_CASE("cli: wpre prints fibers") {
  auto r = run("wpre --mech 'x := x + 1' --post 'outcome = x' --interp " +
               one_agent_interp() + " --format json");
  CHECK(r.code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["capped"] == false);
  REQUIRE(doc["fibers"].size() == 3);
  CHECK(doc["fibers"][0]["state"]["x"] == 0);
  CHECK(doc["fibers"][0]["outcomes"][0] == 1);
  CHECK(doc["fibers"][2]["outcomes"][0] == 2);  // saturates at the sort bound
}

TEST_CASE("cli: derive and check-derivation round trip") {
  auto out = (work_dir() / "seq.deriv.json").string();
  auto derive = run("derive --mech 'x := x + 1; x := x + 1' "
                    "--pre 'outcome = x + 2' --post 'outcome = x' --interp " +
                    one_agent_interp() + " --out " + out);
  CHECK(derive.code == 0);

  auto check = run("check-derivation --derivation " + out + " --interp " +
                   one_agent_interp());
  CHECK(check.code == 0);
  CHECK(check.out.find("derivation accepted") != std::string::npos);

  // tampering with the recorded midpoint must be caught
  std::ifstream in(out);
  nlohmann::ordered_json doc = nlohmann::ordered_json::parse(in);
  doc["midpoint"] = "outcome = 0";
  auto tampered = file_with("tampered.deriv.json", doc.dump());
  auto bad = run("check-derivation --derivation " + tampered + " --interp " +
                 one_agent_interp());
  CHECK(bad.code == 1);
  CHECK(bad.out.find("FAIL") != std::string::npos);
  CHECK(bad.out.find("derivation rejected") != std::string::npos);

  auto unprovable = run("derive --mech 'x := 0' --pre 'outcome = 1' "
                        "--post 'outcome = x' --interp " + one_agent_interp());
  CHECK(unprovable.code == 1);
}

TEST_CASE("cli: simulate runs a scripted play") {
  auto r = run("simulate --mech 'ch {1} (x); u := x + 1' --interp " +
               one_agent_interp() + " --script 'x = 2' --format json");
  CHECK(r.code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["final"]["x"] == 2);
  CHECK(doc["final"]["u"] == 3);
}

TEST_CASE("cli: classify names the mechanism class") {
  CHECK(run("classify --mech 'x := 1'").out == "PRG\n");
  CHECK(run("classify --mech 'ch {1} (x); u := 1'").out == "PI\n");
  CHECK(run("classify --mech 'ch {1, 2} (x, u)'").out == "GENERAL\n");
}

TEST_CASE("cli: implement checks each profile of a social choice spec") {
  auto spec = file_with("flip.spec.json", R"({
    "profiles": [
      {"name": "high", "preferences": {"1": {"utility": [{"then": "outcome"}]}},
       "outcomes": [2]},
      {"name": "low", "preferences": {"1": {"utility": [{"then": "0 - outcome"}]}},
       "outcomes": [0]}
    ]
  })");
  auto good = run("implement --mech 'ch {1} (x)' --post 'outcome = x' --interp " +
                  one_agent_interp() + " --spec " + spec + " --format json");
  CHECK(good.code == 0);
  auto doc = nlohmann::json::parse(good.out);
  CHECK(doc["implements"] == true);

  auto wrong = file_with("wrong.spec.json", R"({
    "profiles": [
      {"name": "high", "preferences": {"1": {"utility": [{"then": "outcome"}]}},
       "outcomes": [1]}
    ]
  })");
  auto bad = run("implement --mech 'ch {1} (x)' --post 'outcome = x' --interp " +
                 one_agent_interp() + " --spec " + wrong);
  CHECK(bad.code == 1);
}

TEST_CASE("cli: embed decides classical partial correctness") {
  std::string base = " --interp " + one_agent_interp();
  CHECK(run("embed --mech 'x := 1' --pre true --post 'x = 1'" + base).code == 0);
  CHECK(run("embed --mech 'x := 1' --pre true --post 'x = 2'" + base).code == 1);
  CHECK(run("embed --mech 'ch {1} (x)' --pre true --post true" + base).code == 3);
}

#endif  // MPL_CLI_PATH
