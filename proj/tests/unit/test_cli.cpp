#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "fmp/cli.hpp"
#include "fmp/io.hpp"
#include "json.hpp"

using namespace fmp;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fmp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "fmp_cli_test" / name;
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("run writes every artifact and exits 0 on convergence") {
  const fs::path dir = scratch("run_ok");
  const auto r = cli({"run", "--gen", "random", "--seed", "1", "--out", dir.string(),
                      "--threads", "2"});
  CHECK(r.code == kExitConverged);
  CHECK(r.out.find("converged=yes") != std::string::npos);
  for (const char* f : {"scenario.json", "trajectory.jsonl", "trajectory.csv",
                        "metrics.json"}) {
    CHECK(fs::exists(dir / f));
  }
  const auto m = nlohmann::json::parse(read_file(dir / "metrics.json"));
  CHECK(m["converged"] == true);
  CHECK(m["seed"] == 1);
  CHECK(m["n"] == 30);
  CHECK(read_file(dir / "trajectory.csv").rfind("t,id,px,py,vx,vy\n", 0) == 0);
}

TEST_CASE("replay-check reproduces a recorded run byte for byte") {
  const fs::path dir = scratch("replay");
  REQUIRE(cli({"run", "--gen", "random", "--seed", "4", "--log-stride", "5", "--out",
               dir.string()})
              .code == kExitConverged);
  const auto ok = cli({"replay-check", dir.string(), "--threads", "1,2,3"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("DIFFERS") == std::string::npos);
  CHECK(ok.out.find("threads=3: identical") != std::string::npos);

  std::string text = read_file(dir / "trajectory.jsonl");
  text[text.size() / 2] = text[text.size() / 2] == '1' ? '2' : '1';
  write_file(dir / "trajectory.jsonl", text);
  CHECK(cli({"replay-check", dir.string(), "--threads", "1"}).code == kExitError);
}

TEST_CASE("run exits 2 when the time limit is hit") {
  const auto r = cli({"run", "--gen", "random", "--max-sim-time", "0.1"});
  CHECK(r.code == kExitNotConverged);
  CHECK(r.out.find("converged=no") != std::string::npos);
}

TEST_CASE("run exits 1 on a spacing violation") {
  const fs::path dir = scratch("bad");
  write_file(dir / "bad.json",
             R"({"dim": 2, "d_star": 5, "starts": [[0, 0], [1, 0]],
                 "goals": [[0, 30], [10, 30]]})");
  const auto r = cli({"run", "--scenario", (dir / "bad.json").string()});
  CHECK(r.code == kExitError);
  CHECK(r.err.find("invalid scenario") != std::string::npos);
}

TEST_CASE("run exits 1 on a malformed scenario file") {
  const fs::path dir = scratch("malformed");
  write_file(dir / "m.json", "{\"dim\": 2,");
  const auto r = cli({"run", "--scenario", (dir / "m.json").string()});
  CHECK(r.code == kExitError);
  CHECK(r.err.find("m.json:") != std::string::npos);
}

TEST_CASE("gen emits a scenario that parses back") {
  const auto r = cli({"gen", "circle", "--n", "10"});
  REQUIRE(r.code == 0);
  const auto f = parse_scenario(r.out);
  CHECK(f.scenario.size() == 10);
  CHECK(f.scenario.preassigned);
  CHECK(*f.overrides.d_star == 3.0);

  const fs::path dir = scratch("gen");
  CHECK(cli({"gen", "swap", "--n", "4", "--spacing", "7", "-o",
             (dir / "s.json").string()})
            .code == 0);
  CHECK(load_scenario(dir / "s.json").scenario.size() == 4);
}

TEST_CASE("bench prints one row per case") {
  const auto r = cli({"bench", "random", "--cases", "2", "--seed", "3"});
  CHECK(r.code == kExitConverged);
  std::istringstream in(r.out);
  std::string line;
  int rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.rfind("suite,", 0) == 0) header = true;
    if (line.rfind("random,", 0) == 0) ++rows;
  }
  CHECK(header);
  CHECK(rows == 2);
  CHECK(r.out.find("# runs=2 converged=2") != std::string::npos);
}

TEST_CASE("bench writes its outputs") {
  const fs::path dir = scratch("bench");
  CHECK(cli({"bench", "formation", "--spacing", "12", "--out", dir.string(), "--jobs",
             "1"})
            .code == kExitConverged);
  CHECK(fs::exists(dir / "summary.csv"));
  const std::string runs = read_file(dir / "runs.jsonl");
  CHECK(std::count(runs.begin(), runs.end(), '\n') == 1);
  CHECK(nlohmann::json::parse(runs)["converged"] == true);
}

TEST_CASE("usage errors exit 1 and help exits 0") {
  CHECK(cli({"bench", "nope"}).code == kExitError);
  CHECK(cli({}).code == kExitError);
  CHECK(cli({"run", "--gen", "random", "--scenario", "x.json"}).code == kExitError);
  CHECK(cli({"run", "--gen", "teapot"}).code == kExitError);
  CHECK(cli({"run", "--scenario", "/nonexistent/x.json"}).code == kExitError);
  const auto help = cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("Exit status") != std::string::npos);
}
