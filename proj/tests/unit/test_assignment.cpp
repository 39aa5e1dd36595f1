#include <algorithm>
#include <random>

#include "doctest.h"
#include "fmp/assignment.hpp"
#include "oracles.hpp"

using namespace fmp;

namespace {

bool is_permutation_of_n(const std::vector<std::size_t>& perm) {
  std::vector<std::size_t> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != i) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("assignment_cost examples") {
  const std::vector<VecD> a{VecD(0, 0), VecD(1, 0)};
  const std::vector<VecD> b{VecD(1, 0), VecD(0, 0)};
  const std::vector<std::size_t> id{0, 1}, swap{1, 0};
  CHECK(assignment_cost(a, a, id) == 0.0);
  CHECK(assignment_cost(a, b, swap) == 0.0);
  CHECK(assignment_cost(a, b, id) == 2.0);
}

TEST_CASE("assignment_cost rejects non-bijections") {
  const std::vector<VecD> a{VecD(0, 0), VecD(1, 0)};
  const std::vector<std::size_t> dup{0, 0}, out_of_range{0, 2}, short_perm{0};
  CHECK_THROWS_AS(assignment_cost(a, a, dup), ConfigError);
  CHECK_THROWS_AS(assignment_cost(a, a, out_of_range), ConfigError);
  CHECK_THROWS_AS(assignment_cost(a, a, short_perm), ConfigError);
}

TEST_CASE("hungarian examples") {
  const std::vector<VecD> a{VecD(0, 0), VecD(1, 0)};
  const std::vector<VecD> b{VecD(1, 0), VecD(0, 0)};
  const auto res = hungarian_assign(a, b);
  CHECK(res.perm == std::vector<std::size_t>{1, 0});
  CHECK(res.total_cost == 0.0);

  std::vector<VecD> five;
  for (int i = 0; i < 5; ++i) five.push_back(VecD(6.0 * i, 3.0 * (i % 2)));
  const auto id = hungarian_assign(five, five);
  CHECK(id.perm == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(id.total_cost == 0.0);

  const std::vector<VecD> none;
  CHECK_THROWS_AS(hungarian_assign(none, none), ConfigError);
  CHECK_THROWS_AS(hungarian_assign(a, std::vector<VecD>{VecD(0, 0)}), ConfigError);
}

TEST_CASE("hungarian matches exhaustive search on a fixed n = 6 instance") {
  std::mt19937_64 rng(2024);
  const auto s = oracle::random_points(rng, 6, 2, -20.0, 20.0);
  const auto g = oracle::random_points(rng, 6, 2, -20.0, 20.0);
  const auto res = hungarian_assign(s, g);
  CHECK(is_permutation_of_n(res.perm));
  CHECK(res.total_cost == doctest::Approx(oracle::min_assignment_cost(s, g)).epsilon(1e-12));
  CHECK(res.total_cost == doctest::Approx(assignment_cost(s, g, res.perm)).epsilon(1e-12));
}

TEST_CASE("hungarian is optimal on random instances up to n = 7") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rep % 7;
    const int dim = rep % 3 == 0 ? 3 : 2;
    const auto s = oracle::random_points(rng, n, dim, -50.0, 50.0);
    const auto g = oracle::random_points(rng, n, dim, -50.0, 50.0);
    const auto res = hungarian_assign(s, g);
    REQUIRE(is_permutation_of_n(res.perm));
    CHECK(res.total_cost ==
          doctest::Approx(oracle::min_assignment_cost(s, g)).epsilon(1e-12));
  }
}

TEST_CASE("optimal cost is translation invariant") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 50; ++rep) {
    auto s = oracle::random_points(rng, 6, 2, -10.0, 10.0);
    auto g = oracle::random_points(rng, 6, 2, -10.0, 10.0);
    const double before = hungarian_assign(s, g).total_cost;
    const VecD shift(123.5, -77.25);
    for (auto& p : s) p += shift;
    for (auto& p : g) p += shift;
    CHECK(hungarian_assign(s, g).total_cost == doctest::Approx(before).epsilon(1e-9));
  }
}

TEST_CASE("apply_assignment permutes goals") {
  const std::vector<VecD> g{VecD(0, 0), VecD(1, 1), VecD(2, 2)};
  const std::vector<std::size_t> perm{2, 0, 1};
  const auto t = apply_assignment(g, perm);
  CHECK(t[0] == g[2]);
  CHECK(t[1] == g[0]);
  CHECK(t[2] == g[1]);
}
