#include "fmp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fmp {

double lbt_opt(std::span<const VecD> starts, std::span<const VecD> goals,
               double v_max) {
  if (starts.size() != goals.size()) {
    throw ConfigError("lbt_opt: starts and goals differ in length");
  }
  if (!(v_max > 0.0)) throw ConfigError("lbt_opt: v_max must be > 0");
  double longest = 0.0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    longest = std::max(longest, distance(starts[i], goals[i]));
  }
  return longest / v_max;
}

SeparationSeries min_separation(const std::vector<StepRecord>& trajectory) {
  if (trajectory.empty()) throw ConfigError("min_separation: empty trajectory");
  SeparationSeries out;
  out.minimum = std::numeric_limits<double>::infinity();
  out.per_step.reserve(trajectory.size());
  for (const auto& rec : trajectory) {
    const double m = min_pairwise_distance(rec.positions);
    out.per_step.push_back(m);
    out.minimum = std::min(out.minimum, m);
  }
  return out;
}

double energy_tolerance(double h, double dt) {
  return std::max(1e-6, 1e-3 * dt * std::abs(h));
}

namespace {

// Index of the first logged step inside the final window, or size() if the
// run is shorter than the window.
std::size_t window_start(const StepSeries& s, double window) {
  if (s.t.empty() || s.t.back() - s.t.front() < window) return s.t.size();
  const double from = s.t.back() - window;
  return static_cast<std::size_t>(
      std::lower_bound(s.t.begin(), s.t.end(), from - 1e-9) - s.t.begin());
}

}  // namespace

bool detect_deadlock(const RunResult& run, const ControlParams& params,
                     const DeadlockOptions& options) {
  if (run.converged) return false;
  const StepSeries& s = run.series;
  const std::size_t begin = window_start(s, options.window);
  if (begin >= s.t.size()) return false;
  const double slow = options.speed_fraction * params.v_max_eff();
  for (std::size_t k = begin; k < s.t.size(); ++k) {
    if (!(s.max_speed[k] < slow)) return false;
    if (!(s.max_goal_distance[k] >= params.end_max_dis)) return false;
  }
  return true;
}

bool detect_livelock(const RunResult& run, const ControlParams& params,
                     const DeadlockOptions& options) {
  if (run.converged || detect_deadlock(run, params, options)) return false;
  const StepSeries& s = run.series;
  if (s.t.size() < 2) return false;
  const double span = s.t.back() - s.t.front();
  const std::size_t begin = window_start(s, options.livelock_fraction * span);
  if (begin + 1 >= s.t.size()) return false;
  for (std::size_t k = begin + 1; k < s.t.size(); ++k) {
    if (s.max_goal_distance[k] < s.max_goal_distance[k - 1]) return false;
  }
  return true;
}

RunMetrics summarize(const RunResult& run, const Scenario& scenario,
                     const ControlParams& params,
                     const DeadlockOptions& options) {
  RunMetrics m;
  const StepSeries& s = run.series;
  m.transition_time = run.transition_time;
  m.execution_time = run.execution_ms;
  m.converged = run.converged;
  m.faulted = run.fault.has_value();
  m.steps = run.steps;
  m.lbt_opt = lbt_opt(scenario.starts, run.targets, params.v_max_eff());
  m.min_separation = std::numeric_limits<double>::infinity();
  for (double v : s.min_separation) m.min_separation = std::min(m.min_separation, v);
  m.min_obstacle_clearance = std::numeric_limits<double>::infinity();
  for (double v : s.min_obstacle_clearance) {
    m.min_obstacle_clearance = std::min(m.min_obstacle_clearance, v);
  }
  m.max_limit_excess = -std::numeric_limits<double>::infinity();
  for (double v : s.limit_excess) m.max_limit_excess = std::max(m.max_limit_excess, v);
  m.max_hamiltonian_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < s.hamiltonian.size(); ++k) {
    const double rise = s.hamiltonian[k] - s.hamiltonian[k - 1];
    m.max_hamiltonian_increase = std::max(m.max_hamiltonian_increase, rise);
    if (rise > energy_tolerance(s.hamiltonian[k - 1], params.dt)) {
      ++m.energy_violations;
    }
  }
  if (s.hamiltonian.size() < 2) m.max_hamiltonian_increase = 0.0;
  m.deadlock = detect_deadlock(run, params, options);
  m.livelock = detect_livelock(run, params, options);
  return m;
}

}  // namespace fmp
