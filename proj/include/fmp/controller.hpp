#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fmp/core.hpp"

namespace fmp {

/// Pairwise distances below this are treated as coincident agents.
inline constexpr double kCoincidentDistance = 1e-9;

/// Repulsive law phi(z) = -rho (z - r)^2 on (0, r), zero beyond r.
/// Throws ConfigError for z <= 0.
double repulsive_phi(double z, double r, double rho);

/// Pair potential psi(z) = (rho / 3)(r - z)^3 on (0, r), zero beyond r;
/// psi' = phi.
double repulsive_potential(double z, double r, double rho);

/// Sum of phi(|p_j - p_i|) (p_j - p_i) / |p_j - p_i| over agents j != i
/// closer than r. Scans every agent.
VecD repulsive_force(std::size_t i, std::span<const VecD> positions, double r,
                     double rho);

/// Same sum restricted to `candidates` (ascending, may include i). Gives the
/// bit-identical result of the full scan when candidates cover every j with
/// |p_j - p_i| < r.
VecD repulsive_force(std::size_t i, std::span<const VecD> positions,
                     std::span<const std::size_t> candidates, double r,
                     double rho);

/// PD attraction -c1 (p - target) - c2 v.
VecD navigational_feedback(const VecD& p, const VecD& v, const VecD& target,
                           double c1, double c2);

/// Repulsion from every obstacle whose surface lies within r_hat of p, along
/// the line from the obstacle center. Throws SimulationFault if p is on or
/// inside an obstacle.
VecD obstacle_force(const VecD& p, std::span<const Obstacle> obstacles,
                    double r_hat, double rho_hat);

/// r = cbrt(3 v^2 / (2 rho)) + d.
double comm_radius(double v_max, double rho, double d);

/// Initial-spacing bound d that guarantees separation d_star for n agents:
/// d = d_star + cbrt(((k n - 3) v^2 + 3 n xi) / (2 rho)), k = 9 in 2D and
/// 18 in 3D.
double d_from_dstar(double d_star, std::size_t n, double xi, double v_max,
                    double rho, int dim);

/// Default obstacle interaction range: clearance + cbrt(3 v^2 / (2 rho_hat)).
double obstacle_range(double d_hat_star, double v_max, double rho_hat);

VecD cap_velocity(const VecD& v, const VelocityLimit& limit);
/// True when cap_velocity would change v.
bool cap_active(const VecD& v, const VelocityLimit& limit);

struct ForceBreakdown {
  VecD repulsive;
  VecD navigational;
  VecD obstacle;
  VecD total;
};

/// Read-only view of the system used to evaluate the control law.
struct WorldSnapshot {
  std::span<const VecD> positions;
  std::span<const VecD> velocities;
  std::span<const VecD> targets;
  std::span<const Obstacle> obstacles;
};

/// Total control for agent i from the snapshot. With `candidates` given, the
/// repulsive sum only visits those indices.
ForceBreakdown control_input(std::size_t i, const WorldSnapshot& world,
                             const ControlParams& params);
ForceBreakdown control_input(std::size_t i, const WorldSnapshot& world,
                             const ControlParams& params,
                             std::span<const std::size_t> candidates);

}  // namespace fmp
