#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fmp/core.hpp"
#include "fmp/simulator.hpp"

namespace fmp {

struct RunMetrics {
  double transition_time = 0.0;  // s
  double execution_time = 0.0;   // ms, stepping loop only
  double min_separation = 0.0;
  double min_obstacle_clearance = 0.0;  // +inf without obstacles
  double lbt_opt = 0.0;
  bool converged = false;
  bool deadlock = false;
  bool livelock = false;
  std::size_t steps = 0;
  double max_hamiltonian_increase = 0.0;
  /// Steps whose energy increase exceeded energy_tolerance().
  std::size_t energy_violations = 0;
  /// Largest velocity-limit overshoot over the run (<= 0 when none).
  double max_limit_excess = 0.0;
  bool faulted = false;
};

/// Straight-line-at-top-speed bound: max_i |goal_i - start_i| / v_max.
double lbt_opt(std::span<const VecD> starts, std::span<const VecD> goals,
               double v_max);

struct SeparationSeries {
  double minimum = 0.0;
  std::vector<double> per_step;
};

/// Brute-force minimum pairwise distance over every logged step.
/// Throws ConfigError for an empty trajectory.
SeparationSeries min_separation(const std::vector<StepRecord>& trajectory);

/// Allowed per-step Hamiltonian growth from discretization.
double energy_tolerance(double h, double dt);

struct DeadlockOptions {
  double window = 5.0;           // s of simulated time
  double speed_fraction = 0.01;  // of v_max
  double livelock_fraction = 0.25;
};

/// Not converged, and during the last `window` seconds every speed stayed
/// below speed_fraction * v_max while some agent was still off its goal.
bool detect_deadlock(const RunResult& run, const ControlParams& params,
                     const DeadlockOptions& options = {});

/// Not converged, not deadlocked, and the max goal distance never decreased
/// over the final livelock_fraction of the run.
bool detect_livelock(const RunResult& run, const ControlParams& params,
                     const DeadlockOptions& options = {});

RunMetrics summarize(const RunResult& run, const Scenario& scenario,
                     const ControlParams& params,
                     const DeadlockOptions& options = {});

}  // namespace fmp
