#include "fmp/assignment.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace fmp {

namespace {

void check_perm(std::size_t n, std::span<const std::size_t> perm) {
  if (perm.size() != n) {
    throw ConfigError("permutation length " + std::to_string(perm.size()) +
                      " != " + std::to_string(n));
  }
  std::vector<bool> seen(n, false);
  for (std::size_t g : perm) {
    if (g >= n || seen[g]) throw ConfigError("permutation is not a bijection");
    seen[g] = true;
  }
}

}  // namespace

double assignment_cost(std::span<const VecD> starts, std::span<const VecD> goals,
                       std::span<const std::size_t> perm) {
  if (starts.size() != goals.size()) {
    throw ConfigError("starts and goals differ in length");
  }
  check_perm(starts.size(), perm);
  double total = 0.0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    total += distance(starts[i], goals[perm[i]]);
  }
  return total;
}

Assignment hungarian_assign(std::span<const VecD> starts,
                            std::span<const VecD> goals) {
  const std::size_t n = starts.size();
  if (n == 0) throw ConfigError("hungarian_assign: empty input");
  if (goals.size() != n) throw ConfigError("starts and goals differ in length");

  // cost[i][j] = distance(start i, goal j); the potentials below are 1-based.
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cost[i * n + j] = distance(starts[i], goals[j]);
    }
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  // owner[j] = row matched to column j (1-based, 0 = free).
  std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);
  std::vector<double> min_to(n + 1);
  std::vector<bool> used(n + 1);

  for (std::size_t row = 1; row <= n; ++row) {
    owner[0] = row;
    std::size_t col = 0;
    std::fill(min_to.begin(), min_to.end(), kInf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[col] = true;
      const std::size_t i0 = owner[col];
      double delta = kInf;
      std::size_t next = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (reduced < min_to[j]) {
          min_to[j] = reduced;
          way[j] = col;
        }
        if (min_to[j] < delta) {
          delta = min_to[j];
          next = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          min_to[j] -= delta;
        }
      }
      col = next;
    } while (owner[col] != 0);
    // Augment along the alternating path.
    do {
      const std::size_t prev = way[col];
      owner[col] = owner[prev];
      col = prev;
    } while (col != 0);
  }

  Assignment out;
  out.perm.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) out.perm[owner[j] - 1] = j - 1;
  out.total_cost = assignment_cost(starts, goals, out.perm);
  return out;
}

std::vector<VecD> apply_assignment(std::span<const VecD> goals,
                                   std::span<const std::size_t> perm) {
  check_perm(goals.size(), perm);
  std::vector<VecD> out;
  out.reserve(goals.size());
  for (std::size_t g : perm) out.push_back(goals[g]);
  return out;
}

}  // namespace fmp
