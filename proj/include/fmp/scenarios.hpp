#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fmp/core.hpp"
#include "fmp/simulator.hpp"

namespace fmp {

/// Axis-aligned box; lo and hi share the box dimension.
struct Box {
  VecD lo;
  VecD hi;
  int dim() const { return lo.dim(); }
};

/// Antipodal swap on a circle in the xy-plane: start k at angle 2 pi k / n,
/// goal k at the opposite point. Throws ConfigError if adjacent starts are
/// closer than min_spacing. Marked preassigned.
Scenario circle_scenario(std::size_t n, double radius, double min_spacing,
                         int dim = 2);

/// Smallest circle radius whose adjacent spacing is at least
/// spacing_factor * d, with d derived for that circle (d grows with the
/// radius through xi).
double circle_radius_for(std::size_t n, double d_star, double v_max, double rho,
                         int dim = 2, double spacing_factor = 1.0);

enum class SwapKind { kMirror, kDiagonal };

/// sqrt(n) x sqrt(n) grid centered on the origin. Mirror sends cell
/// (row, col) to (row, k-1-col); diagonal sends it to (col, row). Starts are
/// displaced by up to `jitter` meters per axis (seeded) when jitter > 0.
/// Marked preassigned.
Scenario grid_swap_scenario(SwapKind kind, std::size_t n, double spacing,
                            double min_spacing, double jitter = 0.0,
                            std::uint64_t seed = 0);

/// Bridson dart throwing (30 candidates per active point, cell size
/// min_spacing / sqrt(dim)) until the box is saturated, then a seeded choice
/// of n of the samples. Re-seeds and retries when a saturated sample has
/// fewer than n points.
std::vector<VecD> poisson_disc(const Box& box, double min_spacing, std::size_t n,
                               std::uint64_t seed);

struct RandomCaseSpec {
  std::size_t n = 30;
  Box box;
  /// Sampling spacing; 0 means derive it from the parameters.
  double min_spacing = 0.0;
  std::uint64_t seed = 0;
};

/// Starts and goals drawn independently by poisson_disc with spacing d,
/// where d is derived with xi bounded by the squared box diagonal. Targets
/// are left to the Hungarian assignment.
Scenario random_scenario(RandomCaseSpec spec, const ParamOverrides& params);

/// Four 5x5 groups left, right, above and below a central crossing formed by
/// four static discs; each group heads for the opposite group's cells.
Scenario obstacle_passage_scenario();
/// Parameters shipped with the obstacle passage scenario.
ParamOverrides obstacle_passage_params();

/// Circle of n nodes to two concentric circles of n/2 nodes each. Adjacent
/// nodes are `spacing` apart on every circle and the rings are `spacing`
/// apart. Targets are left to the Hungarian assignment.
Scenario formation_scenario(std::size_t n, double spacing, double min_spacing);

/// Parameter sets of the paper-scale benchmarks.
ParamOverrides circle_params();      // d* = 3, v_max = 15
ParamOverrides swap_params();        // d* = 5, v_max = 15
ParamOverrides scale_params();       // d* = 5, v_max = 15
ParamOverrides random_params();      // d* = 5, v_max = 3
ParamOverrides formation_params();   // d* = 0.4, v_max = 10
ParamOverrides scale3d_params();     // d* = 3, per-axis 9 / 3 / 6

/// 64-bit mixer used to derive independent seeds.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace fmp
