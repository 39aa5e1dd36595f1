#include "fmp/scenarios.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fmp/controller.hpp"

namespace fmp {

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

// Uniform [0, 1) from the top 53 bits; identical on every standard library.
double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit(rng);
}

std::size_t below(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(unit(rng) * static_cast<double>(n));
}

VecD make_vec(int dim, double x, double y, double z = 0.0) {
  return dim == 2 ? VecD(x, y) : VecD(x, y, z);
}

}  // namespace

Scenario circle_scenario(std::size_t n, double radius, double min_spacing,
                         int dim) {
  if (n < 2) throw ConfigError("circle_scenario: need n >= 2");
  if (!(radius > 0.0)) throw ConfigError("circle_scenario: radius must be > 0");
  if (dim != 2 && dim != 3) throw ConfigError("dim must be 2 or 3");
  const double half_angle = std::numbers::pi / static_cast<double>(n);
  const double chord = 2.0 * radius * std::sin(half_angle);
  if (chord < min_spacing) {
    std::ostringstream msg;
    msg << "circle_scenario: adjacent spacing " << chord << " < " << min_spacing
        << "; need radius >= " << min_spacing / (2.0 * std::sin(half_angle));
    throw ConfigError(msg.str());
  }
  Scenario s;
  s.name = "circle-" + std::to_string(n);
  s.dim = dim;
  s.preassigned = true;
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = 2.0 * half_angle * static_cast<double>(k);
    const double x = radius * std::cos(angle);
    const double y = radius * std::sin(angle);
    s.starts.push_back(make_vec(dim, x, y));
    s.goals.push_back(make_vec(dim, -x, -y));
  }
  return s;
}

double circle_radius_for(std::size_t n, double d_star, double v_max, double rho,
                         int dim, double spacing_factor) {
  if (n < 2) throw ConfigError("circle_radius_for: need n >= 2");
  const double s = std::sin(std::numbers::pi / static_cast<double>(n));
  // chord(R) - factor * d(R) is convex in R and negative at 0: one root.
  auto excess = [&](double radius) {
    const double xi = 4.0 * radius * radius;
    return 2.0 * radius * s -
           spacing_factor * d_from_dstar(d_star, n, xi, v_max, rho, dim);
  };
  double lo = 0.0;
  double hi = std::max(1.0, d_star);
  while (excess(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  return hi * (1.0 + 1e-6);
}

Scenario grid_swap_scenario(SwapKind kind, std::size_t n, double spacing,
                            double min_spacing, double jitter,
                            std::uint64_t seed) {
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(n)));
  if (n == 0 || side * side != n) {
    throw ConfigError("grid_swap_scenario: n must be a perfect square");
  }
  if (!(jitter >= 0.0)) throw ConfigError("grid_swap_scenario: jitter must be >= 0");
  if (spacing - 2.0 * std::sqrt(2.0) * jitter < min_spacing) {
    std::ostringstream msg;
    msg << "grid_swap_scenario: spacing " << spacing << " (jitter " << jitter
        << ") is below the minimum spacing " << min_spacing;
    throw ConfigError(msg.str());
  }
  const double center = 0.5 * static_cast<double>(side - 1);
  auto cell = [&](std::size_t row, std::size_t col) {
    return VecD((static_cast<double>(col) - center) * spacing,
                (static_cast<double>(row) - center) * spacing);
  };
  std::mt19937_64 rng(split_seed(seed, 0));
  Scenario s;
  s.name = std::string(kind == SwapKind::kMirror ? "mirror" : "diagonal") +
           "-swap-" + std::to_string(n);
  s.dim = 2;
  s.preassigned = true;
  for (std::size_t row = 0; row < side; ++row) {
    for (std::size_t col = 0; col < side; ++col) {
      VecD start = cell(row, col);
      if (jitter > 0.0) {
        start[0] += uniform(rng, -jitter, jitter);
        start[1] += uniform(rng, -jitter, jitter);
      }
      s.starts.push_back(start);
      s.goals.push_back(kind == SwapKind::kMirror ? cell(row, side - 1 - col)
                                                  : cell(col, row));
    }
  }
  return s;
}

namespace {

// Upper bound on how many points at mutual distance >= s fit in the box:
// densest packing of radius-s/2 balls in the box grown by s/2 per side.
double packing_bound(const Box& box, double s) {
  double volume = 1.0;
  for (int k = 0; k < box.dim(); ++k) volume *= (box.hi[k] - box.lo[k]) + s;
  if (box.dim() == 2) return volume * 2.0 / (std::sqrt(3.0) * s * s);
  return volume * std::sqrt(2.0) / (s * s * s);
}

std::vector<VecD> bridson(const Box& box, double s, std::mt19937_64& rng) {
  const int dim = box.dim();
  const double cell = s / std::sqrt(static_cast<double>(dim));
  std::array<std::int64_t, 3> dims{1, 1, 1};
  for (int k = 0; k < dim; ++k) {
    dims[static_cast<std::size_t>(k)] = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::floor((box.hi[k] - box.lo[k]) / cell)) + 1);
  }
  std::vector<long> grid(static_cast<std::size_t>(dims[0] * dims[1] * dims[2]), -1);
  auto coord = [&](const VecD& p, int k) {
    const auto c = static_cast<std::int64_t>(std::floor((p[k] - box.lo[k]) / cell));
    return std::clamp<std::int64_t>(c, 0, dims[static_cast<std::size_t>(k)] - 1);
  };
  auto slot = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
    return static_cast<std::size_t>((z * dims[1] + y) * dims[0] + x);
  };

  std::vector<VecD> points;
  std::vector<std::size_t> active;
  auto inside = [&](const VecD& p) {
    for (int k = 0; k < dim; ++k) {
      if (p[k] < box.lo[k] || p[k] > box.hi[k]) return false;
    }
    return true;
  };
  auto far_enough = [&](const VecD& p) {
    const std::int64_t cx = coord(p, 0), cy = coord(p, 1);
    const std::int64_t cz = dim == 3 ? coord(p, 2) : 0;
    const std::int64_t zr = dim == 3 ? 2 : 0;
    for (std::int64_t z = std::max<std::int64_t>(0, cz - zr);
         z <= std::min(dims[2] - 1, cz + zr); ++z) {
      for (std::int64_t y = std::max<std::int64_t>(0, cy - 2);
           y <= std::min(dims[1] - 1, cy + 2); ++y) {
        for (std::int64_t x = std::max<std::int64_t>(0, cx - 2);
             x <= std::min(dims[0] - 1, cx + 2); ++x) {
          const long idx = grid[slot(x, y, z)];
          if (idx >= 0 && distance(points[static_cast<std::size_t>(idx)], p) < s) {
            return false;
          }
        }
      }
    }
    return true;
  };
  auto add = [&](const VecD& p) {
    const std::size_t idx = points.size();
    points.push_back(p);
    active.push_back(idx);
    grid[slot(coord(p, 0), coord(p, 1), dim == 3 ? coord(p, 2) : 0)] =
        static_cast<long>(idx);
  };

  VecD first(dim);
  for (int k = 0; k < dim; ++k) first[k] = uniform(rng, box.lo[k], box.hi[k]);
  add(first);
  constexpr int kAttempts = 30;
  while (!active.empty()) {
    const std::size_t a = below(rng, active.size());
    const VecD base = points[active[a]];
    bool placed = false;
    for (int attempt = 0; attempt < kAttempts && !placed; ++attempt) {
      // Uniform in the annulus [s, 2s] by rejection from the enclosing cube.
      VecD offset(dim);
      double len = 0.0;
      do {
        for (int k = 0; k < dim; ++k) offset[k] = uniform(rng, -2.0 * s, 2.0 * s);
        len = offset.norm();
      } while (len < s || len > 2.0 * s);
      const VecD cand = base + offset;
      if (inside(cand) && far_enough(cand)) {
        add(cand);
        placed = true;
      }
    }
    if (!placed) {
      active[a] = active.back();
      active.pop_back();
    }
  }
  return points;
}

}  // namespace

std::vector<VecD> poisson_disc(const Box& box, double min_spacing, std::size_t n,
                               std::uint64_t seed) {
  const int dim = box.dim();
  if (box.hi.dim() != dim) throw ConfigError("poisson_disc: box corners differ in dim");
  for (int k = 0; k < dim; ++k) {
    if (!(box.hi[k] >= box.lo[k])) throw ConfigError("poisson_disc: empty box");
  }
  if (!(min_spacing > 0.0)) throw ConfigError("poisson_disc: spacing must be > 0");
  if (n == 0) return {};
  if (static_cast<double>(n) > packing_bound(box, min_spacing)) {
    std::ostringstream msg;
    msg << "poisson_disc: " << n << " points at spacing " << min_spacing
        << " cannot fit in the box";
    throw ConfigError(msg.str());
  }
  constexpr std::uint64_t kMaxRetries = 64;
  for (std::uint64_t attempt = 0; attempt < kMaxRetries; ++attempt) {
    std::mt19937_64 rng(split_seed(seed, attempt));
    std::vector<VecD> all = bridson(box, min_spacing, rng);
    if (all.size() < n) continue;
    // Partial Fisher-Yates picks n samples spread over the whole box.
    for (std::size_t k = 0; k < n; ++k) {
      std::swap(all[k], all[k + below(rng, all.size() - k)]);
    }
    all.resize(n);
    return all;
  }
  throw ConfigError("poisson_disc: could not place " + std::to_string(n) +
                    " points after " + std::to_string(kMaxRetries) + " attempts");
}

Scenario random_scenario(RandomCaseSpec spec, const ParamOverrides& params) {
  const int dim = spec.box.dim();
  if (spec.min_spacing <= 0.0) {
    const ControlParams defaults;
    const VelocityLimit limit = params.v_limit.value_or(defaults.v_limit);
    check_velocity_limit(limit, dim);
    double diag2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double side = spec.box.hi[k] - spec.box.lo[k];
      diag2 += side * side;
    }
    spec.min_spacing = d_from_dstar(params.d_star.value_or(defaults.d_star),
                                    std::max<std::size_t>(spec.n, 1), diag2,
                                    effective_v_max(limit),
                                    params.rho.value_or(defaults.rho), dim);
  }
  Scenario s;
  s.name = "random-" + std::to_string(spec.seed);
  s.dim = dim;
  s.starts = poisson_disc(spec.box, spec.min_spacing, spec.n, split_seed(spec.seed, 1));
  s.goals = poisson_disc(spec.box, spec.min_spacing, spec.n, split_seed(spec.seed, 2));
  return s;
}

namespace {

constexpr std::size_t kGroupSide = 5;
constexpr double kGroupSpacing = 2.5;
constexpr double kGroupOffset = 35.0;   // group center distance from origin
constexpr double kObstacleOffset = 12.0;
constexpr double kObstacleRadius = 8.0;

}  // namespace

Scenario obstacle_passage_scenario() {
  Scenario s;
  s.name = "obstacle-passage";
  s.dim = 2;
  s.preassigned = true;
  const double c = 0.5 * static_cast<double>(kGroupSide - 1);
  const VecD group_centers[4] = {VecD(-kGroupOffset, 0.0), VecD(kGroupOffset, 0.0),
                                 VecD(0.0, -kGroupOffset), VecD(0.0, kGroupOffset)};
  const int opposite[4] = {1, 0, 3, 2};
  for (int g = 0; g < 4; ++g) {
    for (std::size_t row = 0; row < kGroupSide; ++row) {
      for (std::size_t col = 0; col < kGroupSide; ++col) {
        const VecD local((static_cast<double>(col) - c) * kGroupSpacing,
                         (static_cast<double>(row) - c) * kGroupSpacing);
        s.starts.push_back(group_centers[g] + local);
        s.goals.push_back(group_centers[opposite[g]] + local);
      }
    }
  }
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) {
      Obstacle o;
      o.center = VecD(sx * kObstacleOffset, sy * kObstacleOffset);
      o.velocity = VecD(0.0, 0.0);
      o.radius = kObstacleRadius;
      s.obstacles.push_back(o);
    }
  }
  return s;
}

ParamOverrides obstacle_passage_params() {
  ParamOverrides p;
  p.d_star = 1.0;
  p.v_limit = UniformLimit{5.0};
  p.d_hat_star = 0.5;
  return p;
}

Scenario formation_scenario(std::size_t n, double spacing, double min_spacing) {
  if (n < 4 || n % 2 != 0) {
    throw ConfigError("formation_scenario: n must be even and >= 4");
  }
  if (spacing < min_spacing) {
    std::ostringstream msg;
    msg << "formation_scenario: spacing " << spacing << " < minimum "
        << min_spacing;
    throw ConfigError(msg.str());
  }
  const double pi = std::numbers::pi;
  const std::size_t half = n / 2;
  const double start_radius = spacing / (2.0 * std::sin(pi / static_cast<double>(n)));
  const double inner = spacing / (2.0 * std::sin(pi / static_cast<double>(half)));
  const double outer = inner + spacing;
  Scenario s;
  s.name = "formation-" + std::to_string(n);
  s.dim = 2;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = 2.0 * pi * static_cast<double>(k) / static_cast<double>(n);
    s.starts.emplace_back(start_radius * std::cos(a), start_radius * std::sin(a));
  }
  for (double radius : {inner, outer}) {
    for (std::size_t k = 0; k < half; ++k) {
      const double a = 2.0 * pi * static_cast<double>(k) / static_cast<double>(half);
      s.goals.emplace_back(radius * std::cos(a), radius * std::sin(a));
    }
  }
  return s;
}

namespace {

ParamOverrides uniform_params(double d_star, double v_max) {
  ParamOverrides p;
  p.d_star = d_star;
  p.v_limit = UniformLimit{v_max};
  return p;
}

}  // namespace

ParamOverrides circle_params() { return uniform_params(3.0, 15.0); }
ParamOverrides swap_params() { return uniform_params(5.0, 15.0); }
ParamOverrides scale_params() { return uniform_params(5.0, 15.0); }
ParamOverrides random_params() { return uniform_params(5.0, 3.0); }
ParamOverrides formation_params() { return uniform_params(0.4, 10.0); }

ParamOverrides scale3d_params() {
  ParamOverrides p;
  p.d_star = 3.0;
  p.v_limit = PerAxisLimit{9.0, 3.0, 6.0};
  return p;
}

}  // namespace fmp
