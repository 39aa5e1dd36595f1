#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fmp/core.hpp"

namespace fmp {

/// One-to-one agent -> goal mapping: agent i is sent to goals[perm[i]].
struct Assignment {
  std::vector<std::size_t> perm;
  double total_cost = 0.0;
};

/// Sum of Euclidean start -> assigned-goal distances. Throws ConfigError if
/// perm is not a bijection on [0, n) or the lengths disagree.
double assignment_cost(std::span<const VecD> starts, std::span<const VecD> goals,
                       std::span<const std::size_t> perm);

/// Minimum-total-distance assignment (Hungarian method with potentials,
/// O(n^3)). Ties are broken by the solver's internal order.
Assignment hungarian_assign(std::span<const VecD> starts,
                            std::span<const VecD> goals);

/// goals permuted so that result[i] = goals[perm[i]].
std::vector<VecD> apply_assignment(std::span<const VecD> goals,
                                   std::span<const std::size_t> perm);

}  // namespace fmp
