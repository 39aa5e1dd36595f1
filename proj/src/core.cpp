#include "fmp/core.hpp"

#include <algorithm>
#include <sstream>

namespace fmp {

VecD VecD::from(const std::vector<double>& components) {
  if (components.size() == 2) return VecD(components[0], components[1]);
  if (components.size() == 3) {
    return VecD(components[0], components[1], components[2]);
  }
  throw ConfigError("vector must have 2 or 3 components, got " +
                    std::to_string(components.size()));
}

double squared_distance(const VecD& a, const VecD& b) {
  return (a - b).squared_norm();
}

double distance(const VecD& a, const VecD& b) { return (a - b).norm(); }

double effective_v_max(const VelocityLimit& limit) {
  if (const auto* u = std::get_if<UniformLimit>(&limit)) return u->v_max;
  const auto& a = std::get<PerAxisLimit>(limit);
  return std::max({a.horizontal, a.up, a.down});
}

double max_speed(const VelocityLimit& limit) {
  if (const auto* u = std::get_if<UniformLimit>(&limit)) return u->v_max;
  const auto& a = std::get<PerAxisLimit>(limit);
  return std::hypot(a.horizontal, std::max(a.up, a.down));
}

void check_velocity_limit(const VelocityLimit& limit, int dim) {
  if (const auto* u = std::get_if<UniformLimit>(&limit)) {
    if (!(u->v_max > 0.0) || !std::isfinite(u->v_max)) {
      throw ConfigError("v_max must be a finite positive number");
    }
    return;
  }
  const auto& a = std::get<PerAxisLimit>(limit);
  if (dim != 3) throw ConfigError("per-axis velocity limits require dim = 3");
  for (double m : {a.horizontal, a.up, a.down}) {
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw ConfigError(
          "per-axis velocity limits must be finite positive magnitudes");
    }
  }
}

void ControlParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string(name) + " must be finite and > 0");
    }
  };
  if (dim != 2 && dim != 3) throw ConfigError("dim must be 2 or 3");
  positive(d_star, "d_star");
  positive(d, "d");
  positive(r, "r");
  positive(rho, "rho");
  positive(c1, "c1");
  positive(c2, "c2");
  positive(dt, "dt");
  positive(end_max_dis, "end_max_dis");
  positive(max_sim_time, "max_sim_time");
  positive(rho_hat, "rho_hat");
  positive(r_hat, "r_hat");
  positive(d_hat_star, "d_hat_star");
  if (!(xi >= 0.0) || !std::isfinite(xi)) {
    throw ConfigError("xi must be finite and >= 0");
  }
  if (!(d_star <= d)) throw ConfigError("require d_star <= d");
  if (!(d < r)) throw ConfigError("require d < r");
  check_velocity_limit(v_limit, dim);
}

VecD Obstacle::velocity_at(double t) const {
  if (schedule.empty()) return velocity;
  const VelocitySegment* active = &schedule.front();
  for (const auto& seg : schedule) {
    if (seg.t <= t) active = &seg;
  }
  return active->velocity;
}

double Obstacle::surface_distance(const VecD& p) const {
  return distance(center, p) - radius;
}

namespace {

const char* kind_name(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::kCount: return "count";
    case Violation::Kind::kNonFinite: return "non-finite";
    case Violation::Kind::kDimension: return "dimension";
    case Violation::Kind::kStartSpacing: return "start spacing";
    case Violation::Kind::kGoalSpacing: return "goal spacing";
  }
  return "?";
}

void check_spacing(const std::vector<VecD>& pts, double d,
                   Violation::Kind kind, std::vector<Violation>& out) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double dist = distance(pts[i], pts[j]);
      if (dist < d) {
        std::ostringstream msg;
        msg << "pair (" << i << "," << j << ") is " << dist
            << " m apart, need >= " << d;
        out.push_back({kind, i, j, dist, msg.str()});
      }
    }
  }
}

}  // namespace

std::string ValidationReport::to_string() const {
  if (ok()) return "ok";
  std::ostringstream out;
  out << violations.size() << " violation(s)";
  for (const auto& v : violations) {
    out << "\n  " << kind_name(v.kind) << ": " << v.message;
  }
  return out.str();
}

ValidationReport validate_scenario(const Scenario& s, const ControlParams& p) {
  ValidationReport report;
  auto& out = report.violations;
  if (s.starts.size() != s.goals.size() || s.starts.empty()) {
    out.push_back({Violation::Kind::kCount, s.starts.size(), s.goals.size(), 0.0,
                   "need |starts| = |goals| >= 1, got " +
                       std::to_string(s.starts.size()) + " and " +
                       std::to_string(s.goals.size())});
  }
  bool dims_ok = s.dim == p.dim;
  if (!dims_ok) {
    out.push_back({Violation::Kind::kDimension, 0, 0, 0.0,
                   "scenario dim " + std::to_string(s.dim) +
                       " != params dim " + std::to_string(p.dim)});
  }
  auto check_points = [&](const std::vector<VecD>& pts, const char* what) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!pts[i].is_finite()) {
        out.push_back({Violation::Kind::kNonFinite, i, i, 0.0,
                       std::string(what) + " " + std::to_string(i) +
                           " has a non-finite component"});
        dims_ok = false;
      } else if (pts[i].dim() != s.dim) {
        out.push_back({Violation::Kind::kDimension, i, i, 0.0,
                       std::string(what) + " " + std::to_string(i) +
                           " has dim " + std::to_string(pts[i].dim())});
        dims_ok = false;
      }
    }
  };
  check_points(s.starts, "start");
  check_points(s.goals, "goal");
  for (std::size_t k = 0; k < s.obstacles.size(); ++k) {
    const auto& o = s.obstacles[k];
    if (!o.center.is_finite() || !std::isfinite(o.radius) || !(o.radius > 0.0)) {
      out.push_back({Violation::Kind::kNonFinite, k, k, 0.0,
                     "obstacle " + std::to_string(k) +
                         " needs a finite center and radius > 0"});
    } else if (o.center.dim() != s.dim || o.velocity.dim() != s.dim) {
      out.push_back({Violation::Kind::kDimension, k, k, 0.0,
                     "obstacle " + std::to_string(k) + " has wrong dimension"});
    }
  }
  if (dims_ok) {
    check_spacing(s.starts, p.d, Violation::Kind::kStartSpacing, out);
    check_spacing(s.goals, p.d, Violation::Kind::kGoalSpacing, out);
  }
  return report;
}

}  // namespace fmp
