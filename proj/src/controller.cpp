#include "fmp/controller.hpp"

#include <algorithm>
#include <string>

namespace fmp {

double repulsive_phi(double z, double r, double rho) {
  if (!(z > 0.0)) {
    throw ConfigError("repulsive_phi: z must be > 0, got " + std::to_string(z));
  }
  if (z >= r) return 0.0;
  const double gap = z - r;
  return -rho * gap * gap;
}

double repulsive_potential(double z, double r, double rho) {
  if (!(z > 0.0)) {
    throw ConfigError("repulsive_potential: z must be > 0");
  }
  if (z >= r) return 0.0;
  const double gap = r - z;
  return rho / 3.0 * gap * gap * gap;
}

namespace {

// Contribution of agent j to agent i's repulsion; zero outside r.
inline void add_pair_repulsion(VecD& f, std::size_t i, std::size_t j,
                               std::span<const VecD> positions, double r,
                               double rho) {
  const VecD diff = positions[j] - positions[i];
  const double dist = diff.norm();
  if (dist >= r) return;
  if (dist < kCoincidentDistance) {
    throw SimulationFault("agents " + std::to_string(i) + " and " +
                              std::to_string(j) + " are coincident",
                          -1, static_cast<long>(i), static_cast<long>(j));
  }
  const double gap = dist - r;
  f += diff * (-rho * gap * gap / dist);
}

}  // namespace

VecD repulsive_force(std::size_t i, std::span<const VecD> positions, double r,
                     double rho) {
  VecD f = VecD::zero(positions[i].dim());
  for (std::size_t j = 0; j < positions.size(); ++j) {
    if (j != i) add_pair_repulsion(f, i, j, positions, r, rho);
  }
  return f;
}

VecD repulsive_force(std::size_t i, std::span<const VecD> positions,
                     std::span<const std::size_t> candidates, double r,
                     double rho) {
  VecD f = VecD::zero(positions[i].dim());
  for (std::size_t j : candidates) {
    if (j != i) add_pair_repulsion(f, i, j, positions, r, rho);
  }
  return f;
}

VecD navigational_feedback(const VecD& p, const VecD& v, const VecD& target,
                           double c1, double c2) {
  return (p - target) * -c1 - v * c2;
}

VecD obstacle_force(const VecD& p, std::span<const Obstacle> obstacles,
                    double r_hat, double rho_hat) {
  VecD f = VecD::zero(p.dim());
  for (std::size_t k = 0; k < obstacles.size(); ++k) {
    const VecD to_center = obstacles[k].center - p;
    const double center_dist = to_center.norm();
    const double surface = center_dist - obstacles[k].radius;
    if (!(surface > 0.0)) {
      throw SimulationFault("agent is inside obstacle " + std::to_string(k), -1,
                            -1, static_cast<long>(k));
    }
    if (surface >= r_hat) continue;
    const double gap = surface - r_hat;
    f += to_center * (-rho_hat * gap * gap / center_dist);
  }
  return f;
}

double comm_radius(double v_max, double rho, double d) {
  return std::cbrt(3.0 * v_max * v_max / (2.0 * rho)) + d;
}

double d_from_dstar(double d_star, std::size_t n, double xi, double v_max,
                    double rho, int dim) {
  if (dim != 2 && dim != 3) throw ConfigError("dim must be 2 or 3");
  const double nn = static_cast<double>(n);
  const double k = dim == 2 ? 9.0 : 18.0;
  return d_star +
         std::cbrt(((k * nn - 3.0) * v_max * v_max + 3.0 * nn * xi) / (2.0 * rho));
}

double obstacle_range(double d_hat_star, double v_max, double rho_hat) {
  return d_hat_star + std::cbrt(3.0 * v_max * v_max / (2.0 * rho_hat));
}

namespace {

// Scales (x, y[, z]) components [0, count) down to norm <= limit. Rounding
// can leave the scaled norm an ulp above the limit; shrink until it is not.
void scale_to(VecD& v, int count, double limit) {
  auto norm = [&] {
    double s = 0.0;
    for (int k = 0; k < count; ++k) s += v[k] * v[k];
    return std::sqrt(s);
  };
  double f = limit / norm();
  while (true) {
    VecD w = v;
    for (int k = 0; k < count; ++k) w[k] *= f;
    double s = 0.0;
    for (int k = 0; k < count; ++k) s += w[k] * w[k];
    if (std::sqrt(s) <= limit) {
      v = w;
      return;
    }
    f = std::nextafter(f, 0.0);
  }
}

}  // namespace

VecD cap_velocity(const VecD& v, const VelocityLimit& limit) {
  if (const auto* u = std::get_if<UniformLimit>(&limit)) {
    if (!(v.norm() > u->v_max)) return v;
    VecD out = v;
    scale_to(out, v.dim(), u->v_max);
    return out;
  }
  const auto& a = std::get<PerAxisLimit>(limit);
  if (v.dim() != 3) throw ConfigError("per-axis velocity limits require dim = 3");
  VecD out = v;
  if (std::sqrt(v[0] * v[0] + v[1] * v[1]) > a.horizontal) scale_to(out, 2, a.horizontal);
  out[2] = std::clamp(v[2], -a.down, a.up);
  return out;
}

bool cap_active(const VecD& v, const VelocityLimit& limit) {
  if (const auto* u = std::get_if<UniformLimit>(&limit)) return v.norm() > u->v_max;
  const auto& a = std::get<PerAxisLimit>(limit);
  return std::sqrt(v[0] * v[0] + v[1] * v[1]) > a.horizontal || v[2] > a.up || v[2] < -a.down;
}

namespace {

ForceBreakdown assemble(std::size_t i, const WorldSnapshot& world,
                        const ControlParams& params, VecD repulsive) {
  ForceBreakdown out;
  out.repulsive = std::move(repulsive);
  out.navigational =
      navigational_feedback(world.positions[i], world.velocities[i],
                            world.targets[i], params.c1, params.c2);
  try {
    out.obstacle = obstacle_force(world.positions[i], world.obstacles,
                                  params.r_hat, params.rho_hat);
  } catch (const SimulationFault& f) {
    throw SimulationFault("agent " + std::to_string(i) + ": " + f.what(), -1,
                          static_cast<long>(i), f.second());
  }
  out.total = out.repulsive + out.navigational + out.obstacle;
  return out;
}

}  // namespace

ForceBreakdown control_input(std::size_t i, const WorldSnapshot& world,
                             const ControlParams& params) {
  if (i >= world.positions.size()) throw ConfigError("agent index out of range");
  return assemble(i, world, params,
                  repulsive_force(i, world.positions, params.r, params.rho));
}

ForceBreakdown control_input(std::size_t i, const WorldSnapshot& world,
                             const ControlParams& params,
                             std::span<const std::size_t> candidates) {
  if (i >= world.positions.size()) throw ConfigError("agent index out of range");
  return assemble(i, world, params,
                  repulsive_force(i, world.positions, candidates, params.r,
                                  params.rho));
}

}  // namespace fmp
