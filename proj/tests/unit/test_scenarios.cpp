#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "fmp/scenarios.hpp"
#include "fmp/suites.hpp"
#include "oracles.hpp"

using namespace fmp;

TEST_CASE("circle examples") {
  const Scenario two = circle_scenario(2, 10.0, 5.0);
  CHECK(two.preassigned);
  CHECK(two.starts[0] == VecD(10, 0));
  CHECK(two.goals[0] == VecD(-10, 0));
  CHECK(oracle::dist(two.starts[1], VecD(-10, 0)) < 1e-12);

  const Scenario four = circle_scenario(4, 10.0, 5.0);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(four.starts[k].norm() == doctest::Approx(10.0));
    CHECK((four.starts[k] + four.goals[k]).norm() < 1e-12);
  }
  CHECK(oracle::min_distance(four.starts) == doctest::Approx(10.0 * std::sqrt(2.0)));

  const Scenario three_d = circle_scenario(6, 10.0, 5.0, 3);
  CHECK(three_d.dim == 3);
  CHECK(three_d.starts[2][2] == 0.0);
}

TEST_CASE("circle rejects a radius below the spacing and names the minimum") {
  try {
    circle_scenario(100, 10.0, 5.0);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const double need = 5.0 / (2.0 * std::sin(std::numbers::pi / 100));
    CHECK(std::string(e.what()).find("need radius") != std::string::npos);
    CHECK(std::string(e.what()).find(std::to_string(need).substr(0, 5)) != std::string::npos);
  }
  CHECK_THROWS_AS(circle_scenario(1, 10.0, 1.0), ConfigError);
}

TEST_CASE("circle_radius_for clears the derived spacing") {
  for (double factor : {1.0, 1.5, 3.0}) {
    const double R = circle_radius_for(100, 3.0, 15.0, 7.5e6, 2, factor);
    const Scenario s = circle_scenario(100, R, 0.0);
    const double d = oracle::d_bound(3.0, 100, 4 * R * R, 15.0, 7.5e6, 2);
    CHECK(oracle::min_distance(s.starts) >= factor * d);
    CHECK(oracle::min_distance(s.starts) <= factor * d * (1 + 1e-4));
  }
}

TEST_CASE("grid swap examples") {
  const Scenario m = grid_swap_scenario(SwapKind::kMirror, 4, 6.0, 5.0);
  REQUIRE(m.size() == 4);
  CHECK(m.starts[0] == VecD(-3, -3));
  CHECK(m.goals[0] == VecD(3, -3));
  CHECK(m.goals[1] == VecD(-3, -3));

  const Scenario d = grid_swap_scenario(SwapKind::kDiagonal, 4, 6.0, 5.0);
  CHECK(d.goals[1] == d.starts[2]);
  CHECK(d.goals[0] == d.starts[0]);

  CHECK_THROWS_AS(grid_swap_scenario(SwapKind::kMirror, 5, 6.0, 5.0), ConfigError);
  CHECK_THROWS_AS(grid_swap_scenario(SwapKind::kMirror, 4, 4.0, 5.0), ConfigError);
}

TEST_CASE("jittered swaps keep their spacing and are seeded") {
  const Scenario a = grid_swap_scenario(SwapKind::kMirror, 100, 9.5, 5.0, 0.5, 3);
  const Scenario b = grid_swap_scenario(SwapKind::kMirror, 100, 9.5, 5.0, 0.5, 3);
  const Scenario c = grid_swap_scenario(SwapKind::kMirror, 100, 9.5, 5.0, 0.5, 4);
  CHECK(a.starts == b.starts);
  CHECK(a.starts != c.starts);
  CHECK(oracle::min_distance(a.starts) >= 5.0);
}

TEST_CASE("poisson_disc spacing, count and determinism") {
  Box box{VecD(0, 0), VecD(40, 40)};
  CHECK(poisson_disc(box, 5.0, 1, 1).size() == 1);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto pts = poisson_disc(box, 5.27, 30, seed);
    REQUIRE(pts.size() == 30);
    CHECK(oracle::min_distance(pts) >= 5.27);
    for (const auto& p : pts) {
      CHECK(p[0] >= 0.0);
      CHECK(p[0] <= 40.0);
      CHECK(p[1] >= 0.0);
      CHECK(p[1] <= 40.0);
    }
    CHECK(poisson_disc(box, 5.27, 30, seed) == pts);
  }
  CHECK(poisson_disc(box, 5.27, 30, 1) != poisson_disc(box, 5.27, 30, 2));
  CHECK_THROWS_AS(poisson_disc(box, 5.0, 1000, 1), ConfigError);
}

TEST_CASE("random cases are valid for their derived spacing") {
  const double d = oracle::d_bound(5.0, 30, 40.0 * 40.0 * 2, 3.0, 7.5e6, 2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Scenario s = random_scenario(table3_spec(seed), random_params());
    REQUIRE(s.size() == 30);
    CHECK_FALSE(s.preassigned);
    CHECK(oracle::min_distance(s.starts) >= d);
    CHECK(oracle::min_distance(s.goals) >= d);
    const PreparedRun p = prepare(s, random_params());
    CHECK(p.validation.ok());
  }
}

TEST_CASE("3D random cases are valid") {
  const Scenario s = random_scenario(random3d_spec(3), scale3d_params());
  CHECK(s.dim == 3);
  CHECK(s.size() == 100);
  const PreparedRun p = prepare(s, scale3d_params());
  CHECK(p.validation.ok());
}

TEST_CASE("obstacle passage layout") {
  const Scenario s = obstacle_passage_scenario();
  CHECK(s.size() == 100);
  CHECK(s.obstacles.size() == 4);
  for (const auto& ob : s.obstacles) {
    for (const auto& p : s.starts) CHECK(ob.surface_distance(p) > 0.0);
    for (const auto& p : s.goals) CHECK(ob.surface_distance(p) > 0.0);
  }
  const PreparedRun p = prepare(s, obstacle_passage_params());
  CHECK(p.validation.ok());
  std::set<std::pair<double, double>> goals;
  for (const auto& g : s.goals) goals.insert({g[0], g[1]});
  CHECK(goals.size() == 100);
}

TEST_CASE("formation layout") {
  for (double spacing : {12.0, 1.0}) {
    const Scenario s = formation_scenario(28, spacing, 0.5);
    CHECK(s.size() == 28);
    CHECK(oracle::min_distance(s.starts) == doctest::Approx(spacing));
    CHECK(oracle::min_distance(s.goals) >= spacing * (1 - 1e-12));
  }
  const Scenario four = formation_scenario(4, 2.0, 1.0);
  CHECK(four.goals.size() == 4);
  CHECK(oracle::dist(four.goals[0], four.goals[2]) == doctest::Approx(2.0));
  CHECK_THROWS_AS(formation_scenario(5, 2.0, 1.0), ConfigError);
  CHECK_THROWS_AS(formation_scenario(28, 0.3, 0.4), ConfigError);
}

TEST_CASE("split_seed separates streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 50; ++s) {
    for (std::uint64_t k = 0; k < 50; ++k) seen.insert(split_seed(s, k));
  }
  CHECK(seen.size() == 2500);
  CHECK(split_seed(1, 2) == split_seed(1, 2));
}

TEST_CASE("every named suite builds valid cases") {
  SuiteOptions small;
  small.cases = 2;
  for (const auto& name : suite_names()) {
    if (name == "scale") continue;
    const auto cases = make_suite(name, small);
    CHECK_FALSE(cases.empty());
    for (const auto& c : cases) {
      CHECK(c.suite == name);
      CHECK(prepare(c.scenario, c.overrides).validation.ok());
    }
  }
  SuiteOptions scale;
  scale.n = {10};
  CHECK(make_suite("scale", scale).size() == 1);
  CHECK_THROWS_AS(make_suite("nope"), ConfigError);
}

TEST_CASE("suite options narrow the cases") {
  SuiteOptions o;
  o.kind = SwapKind::kMirror;
  o.spacing = {9.5};
  const auto cases = make_suite("swap", o);
  REQUIRE(cases.size() == 1);
  CHECK(cases[0].sparse);
  CHECK(make_suite("random", SuiteOptions{{}, {}, {}, 5, 1}).size() == 5);
}
