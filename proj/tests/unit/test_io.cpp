#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "fmp/io.hpp"
#include "json.hpp"

using namespace fmp;
using nlohmann::json;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text, "case.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("parse a minimal scenario") {
  const auto f = parse_scenario(R"({"dim": 2, "starts": [[0, 0], [10, 0]],
                                    "goals": [[0, 20], [10, 20]]})");
  CHECK(f.scenario.dim == 2);
  CHECK(f.scenario.size() == 2);
  CHECK(f.scenario.goals[1] == VecD(10, 20));
  CHECK_FALSE(f.scenario.preassigned);
  CHECK_FALSE(f.seed);
  CHECK_FALSE(f.overrides.d_star);
}

TEST_CASE("scenario round trip is exact") {
  ScenarioFile f;
  f.scenario.name = "trip";
  f.scenario.dim = 3;
  f.scenario.starts = {VecD(0.1, 1.0 / 3.0, -2), VecD(1e-300, 5, 6)};
  f.scenario.goals = {VecD(7, 8, 9), VecD(-0.5, 0, 1e10)};
  f.scenario.preassigned = true;
  Obstacle ob;
  ob.center = VecD(3, 3, 3);
  ob.velocity = VecD(0, 0, 1);
  ob.radius = 0.75;
  ob.schedule = {{0.0, VecD(1, 0, 0)}, {2.5, VecD(0, 0, 0)}};
  f.scenario.obstacles = {ob};
  f.seed = 42;
  f.overrides.d_star = 3.0;
  f.overrides.v_limit = PerAxisLimit{9, 3, 6};
  f.overrides.dt = 0.01;
  f.overrides.r_hat = 1.5;

  const std::string text = scenario_to_json(f);
  const auto g = parse_scenario(text);
  CHECK(g.scenario.name == "trip");
  CHECK(g.scenario.starts == f.scenario.starts);
  CHECK(g.scenario.goals == f.scenario.goals);
  CHECK(g.scenario.preassigned);
  REQUIRE(g.scenario.obstacles.size() == 1);
  CHECK(g.scenario.obstacles[0].center == ob.center);
  CHECK(g.scenario.obstacles[0].schedule.size() == 2);
  CHECK(g.scenario.obstacles[0].schedule[1].velocity == VecD(0, 0, 0));
  CHECK(g.seed == 42u);
  CHECK(*g.overrides.d_star == 3.0);
  CHECK(*g.overrides.dt == 0.01);
  CHECK(*g.overrides.r_hat == 1.5);
  const auto* axes = std::get_if<PerAxisLimit>(&*g.overrides.v_limit);
  REQUIRE(axes);
  CHECK(axes->down == 6.0);
  CHECK(scenario_to_json(g) == text);
}

TEST_CASE("syntax errors carry line and column") {
  const std::string e = error_of("{\n  \"dim\": 2,\n  \"starts\": [[0, 0],\n}");
  CHECK(e.rfind("case.json:4:", 0) == 0);
  CHECK(e.find("malformed JSON") != std::string::npos);
}

TEST_CASE("field errors name the path") {
  CHECK(error_of(R"({"dim": 2, "starts": [[0, 0], [1, 0], [2, 0], [3, "x"]],
                     "goals": [[0, 0], [1, 0], [2, 0], [3, 0]]})")
            .find("field 'starts[3][1]'") != std::string::npos);
  CHECK(error_of(R"({"dim": 2, "starts": [[0, 0]], "goals": [[1, 1]], "speed": 3})")
            .find("field 'speed': unknown field") != std::string::npos);
  CHECK(error_of(R"({"dim": 4, "starts": [], "goals": []})").find("'dim'") !=
        std::string::npos);
  CHECK(error_of(R"({"dim": 2, "starts": [[0, 0]], "goals": [[1, 1]],
                     "obstacles": [{"center": [0, 0]}]})")
            .find("obstacles[0]") != std::string::npos);
  CHECK(error_of(R"([1, 2])") != "");
}

TEST_CASE("v_max accepts a number or per-axis object") {
  auto f = parse_scenario(R"({"dim": 2, "starts": [[0, 0]], "goals": [[1, 1]],
                              "v_max": 4.5})");
  CHECK(std::get<UniformLimit>(*f.overrides.v_limit).v_max == 4.5);
  f = parse_scenario(R"({"dim": 3, "starts": [[0, 0, 0]], "goals": [[1, 1, 1]],
                         "v_max": {"horizontal": 9, "up": 3, "down": 6}})");
  CHECK(std::get<PerAxisLimit>(*f.overrides.v_limit).up == 3.0);
}

TEST_CASE("format_real") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "null");
  CHECK(format_real(std::nan("")) == "null");
}

TEST_CASE("trajectory CSV") {
  StepRecord a;
  a.t = 0.0;
  a.positions = {VecD(1, 2), VecD(3, 4)};
  a.velocities = {VecD(0, 0), VecD(0.5, -0.5)};
  std::ostringstream out;
  write_trajectory_csv(out, 2, {a});
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,id,px,py,vx,vy");
  std::getline(in, line);
  CHECK(line == "0,0,1,2,0,0");
  std::getline(in, line);
  CHECK(line == "0,1,3,4,0.5,-0.5");

  std::ostringstream out3;
  StepRecord b;
  b.positions = {VecD(1, 2, 3)};
  b.velocities = {VecD(0, 0, 0)};
  write_trajectory_csv(out3, 3, {b});
  CHECK(out3.str().rfind("t,id,px,py,pz,vx,vy,vz\n", 0) == 0);
}

TEST_CASE("trajectory JSONL: one parseable object per record") {
  StepRecord a;
  a.t = 0.02;
  a.positions = {VecD(0.1, 0.2)};
  a.velocities = {VecD(1, 0)};
  a.min_separation = std::numeric_limits<double>::infinity();
  a.max_goal_distance = 2.5;
  a.hamiltonian = 10;
  a.cap_active = {1};
  std::ostringstream out;
  write_trajectory_jsonl(out, {a, a});
  std::istringstream in(out.str());
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    const json j = json::parse(line);
    CHECK(j["t"].get<double>() == 0.02);
    CHECK(j["positions"][0][0].get<double>() == 0.1);
    CHECK(j["min_separation"].is_null());
    CHECK(j["cap_active"][0] == true);
    ++count;
  }
  CHECK(count == 2);
  CHECK(out.str().find("0.10000000000000001") != std::string::npos);
}

TEST_CASE("metrics JSON fields") {
  RunMetrics m;
  m.transition_time = 5.5;
  m.min_obstacle_clearance = std::numeric_limits<double>::infinity();
  m.converged = true;
  ControlParams p;
  p.d = 5.3;
  Scenario s;
  s.name = "demo";
  s.starts = {VecD(0, 0)};
  const json j = json::parse(metrics_to_json(m, p, s, 7u, 3));
  CHECK(j["scenario"] == "demo");
  CHECK(j["n"] == 1);
  CHECK(j["seed"] == 7);
  CHECK(j["log_stride"] == 3);
  CHECK(j["transition_time"] == 5.5);
  CHECK(j["converged"] == true);
  CHECK(j["min_obstacle_clearance"].is_null());
  CHECK(j["params"]["d"] == 5.3);
  for (const char* key : {"execution_time", "min_separation", "lbt_opt", "deadlock",
                          "livelock", "steps", "energy_violations", "max_limit_excess",
                          "faulted"}) {
    CHECK(j.contains(key));
  }
  const std::string compact = metrics_to_json(m, p, s, std::nullopt, 1, -1);
  CHECK(compact.find('\n') == compact.size() - 1);
  CHECK(json::parse(compact)["seed"].is_null());
}

TEST_CASE("write_file creates directories") {
  const auto dir = std::filesystem::temp_directory_path() / "fmp_io_test" / "a" / "b";
  std::filesystem::remove_all(dir.parent_path().parent_path());
  write_file(dir / "x.txt", "hello");
  CHECK(read_file(dir / "x.txt") == "hello");
  CHECK_THROWS_AS(read_file(dir / "missing"), ConfigError);
  std::filesystem::remove_all(dir.parent_path().parent_path());
}
