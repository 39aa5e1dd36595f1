#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fmp {

// Bad input: malformed scenario, invalid parameter, dimension mismatch.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A state the force law cannot handle (coincident agents, agent inside an
// obstacle). Carries the step index and offending indices when known.
class SimulationFault : public std::runtime_error {
 public:
  SimulationFault(const std::string& what, long step = -1, long first = -1,
                  long second = -1)
      : std::runtime_error(what), step_(step), first_(first), second_(second) {}

  long step() const { return step_; }
  long first() const { return first_; }
  long second() const { return second_; }

 private:
  long step_;
  long first_;
  long second_;
};

/// Cartesian vector of dimension 2 or 3. Unused trailing components are zero.
class VecD {
 public:
  VecD() = default;
  explicit VecD(int dim) : dim_(check_dim(dim)) {}
  VecD(double x, double y) : c_{x, y, 0.0}, dim_(2) { check_finite(); }
  VecD(double x, double y, double z) : c_{x, y, z}, dim_(3) { check_finite(); }

  /// Builds from a component list; throws ConfigError unless the size is 2
  /// or 3 and every component is finite.
  static VecD from(const std::vector<double>& components);

  static VecD zero(int dim) { return VecD(dim); }

  int dim() const { return dim_; }
  double operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
  double& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
  const std::array<double, 3>& data() const { return c_; }

  bool is_finite() const {
    return std::isfinite(c_[0]) && std::isfinite(c_[1]) && std::isfinite(c_[2]);
  }

  VecD& operator+=(const VecD& o) {
    same_dim(o);
    c_[0] += o.c_[0];
    c_[1] += o.c_[1];
    c_[2] += o.c_[2];
    return *this;
  }
  VecD& operator-=(const VecD& o) {
    same_dim(o);
    c_[0] -= o.c_[0];
    c_[1] -= o.c_[1];
    c_[2] -= o.c_[2];
    return *this;
  }
  VecD& operator*=(double s) {
    c_[0] *= s;
    c_[1] *= s;
    c_[2] *= s;
    return *this;
  }

  friend VecD operator+(VecD a, const VecD& b) { return a += b; }
  friend VecD operator-(VecD a, const VecD& b) { return a -= b; }
  friend VecD operator*(VecD a, double s) { return a *= s; }
  friend VecD operator*(double s, VecD a) { return a *= s; }
  friend VecD operator-(VecD a) { return a *= -1.0; }
  friend bool operator==(const VecD& a, const VecD& b) {
    return a.dim_ == b.dim_ && a.c_ == b.c_;
  }

  double dot(const VecD& o) const {
    same_dim(o);
    return c_[0] * o.c_[0] + c_[1] * o.c_[1] + c_[2] * o.c_[2];
  }
  double squared_norm() const { return dot(*this); }
  double norm() const { return std::sqrt(squared_norm()); }

  void same_dim(const VecD& o) const {
    if (dim_ != o.dim_) {
      throw ConfigError("dimension mismatch: " + std::to_string(dim_) + " vs " +
                        std::to_string(o.dim_));
    }
  }

 private:
  static int check_dim(int dim) {
    if (dim != 2 && dim != 3) {
      throw ConfigError("dimension must be 2 or 3, got " + std::to_string(dim));
    }
    return dim;
  }
  void check_finite() const {
    if (!is_finite()) throw ConfigError("non-finite vector component");
  }

  std::array<double, 3> c_{0.0, 0.0, 0.0};
  int dim_ = 2;
};

/// Euclidean distance; throws ConfigError on dimension mismatch.
double distance(const VecD& a, const VecD& b);
double squared_distance(const VecD& a, const VecD& b);

struct AgentState {
  VecD position;
  VecD velocity;
};

/// Speed bound applied every step. PerAxis is 3D only: the horizontal (x, y)
/// part is norm-clamped, z is clamped to [-down, up].
struct UniformLimit {
  double v_max = 15.0;
};
struct PerAxisLimit {
  double horizontal = 9.0;
  double up = 3.0;
  double down = 6.0;
};
using VelocityLimit = std::variant<UniformLimit, PerAxisLimit>;

/// Largest magnitude of the limit; used wherever a single v_max is needed.
double effective_v_max(const VelocityLimit& limit);
/// Largest speed a capped velocity can have.
double max_speed(const VelocityLimit& limit);
void check_velocity_limit(const VelocityLimit& limit, int dim);

struct ControlParams {
  int dim = 2;
  double d_star = 5.0;
  double d = 5.0;
  double r = 5.0;
  double rho = 7.5e6;
  double c1 = 10.0;
  double c2 = 2.0 * std::sqrt(10.0);
  VelocityLimit v_limit = UniformLimit{};
  double dt = 0.02;
  double end_max_dis = 0.05;
  double max_sim_time = 60.0;
  double xi = 0.0;
  double rho_hat = 7.5e6;
  double r_hat = 0.5;
  double d_hat_star = 0.5;

  double v_max_eff() const { return effective_v_max(v_limit); }
  /// Throws ConfigError if any field breaks its invariants.
  void validate() const;
};

/// Piecewise-constant velocity: `velocity` applies from time `t` until the
/// next segment starts.
struct VelocitySegment {
  double t = 0.0;
  VecD velocity;
};

struct Obstacle {
  VecD center;
  VecD velocity;
  double radius = 1.0;
  /// Optional schedule; when non-empty it overrides `velocity` by time.
  std::vector<VelocitySegment> schedule;

  /// Velocity in effect at time t.
  VecD velocity_at(double t) const;
  /// Signed distance from p to the sphere surface.
  double surface_distance(const VecD& p) const;
};

struct Scenario {
  std::string name = "scenario";
  int dim = 2;
  std::vector<VecD> starts;
  std::vector<VecD> goals;
  std::vector<Obstacle> obstacles;
  bool preassigned = false;

  std::size_t size() const { return starts.size(); }
};

struct Violation {
  enum class Kind { kCount, kNonFinite, kDimension, kStartSpacing, kGoalSpacing };
  Kind kind;
  std::size_t first = 0;
  std::size_t second = 0;
  double distance = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

/// Checks counts, finiteness, dimension and that starts and goals are each
/// pairwise at least p.d apart. Every violating pair is listed.
ValidationReport validate_scenario(const Scenario& s, const ControlParams& p);

}  // namespace fmp
