#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fmp/assignment.hpp"
#include "fmp/controller.hpp"
#include "fmp/core.hpp"

namespace fmp {

/// Fixed set of worker threads for the per-agent map of each step. Results
/// never depend on the worker count.
class WorkerPool {
 public:
  /// threads <= 0 means all available cores.
  explicit WorkerPool(int threads = 1);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  int threads() const { return threads_; }
  /// Runs fn(begin, end) over disjoint chunks of at least `grain` items
  /// covering [0, n).
  void parallel_for(std::size_t n,
                    const std::function<void(std::size_t, std::size_t)>& fn,
                    std::size_t grain = 16);

 private:
  struct Arena;
  int threads_;
  std::unique_ptr<Arena> arena_;
};

/// Thread count from FMP_THREADS, else all cores.
int default_thread_count();

enum class NeighborMode { kAuto, kBruteForce, kGrid };

/// kAuto switches from the O(n^2) scan to the grid at this agent count.
inline constexpr std::size_t kGridThreshold = 256;

struct StepOptions {
  NeighborMode neighbors = NeighborMode::kAuto;
  WorkerPool* pool = nullptr;  // null: evaluate on the calling thread
};

struct World {
  std::size_t step_index = 0;
  double time = 0.0;
  std::vector<VecD> positions;
  std::vector<VecD> velocities;
  std::vector<VecD> targets;
  std::vector<Obstacle> obstacles;
  ControlParams params;

  std::size_t size() const { return positions.size(); }
  AgentState agent(std::size_t i) const { return {positions[i], velocities[i]}; }
  WorldSnapshot snapshot() const {
    return {positions, velocities, targets, obstacles};
  }
};

/// World at rest on the start positions, heading for `targets`.
World make_world(const Scenario& scenario, std::vector<VecD> targets,
                 const ControlParams& params);

/// Per-agent flags from the last step: whether the speed cap clipped the
/// integrated velocity.
struct StepInfo {
  std::vector<char> cap_active;
};

/// One synchronous update. Every agent reads only the pre-step state:
/// v' = cap(v + u dt), p' = p + v' dt. Obstacles then move by their
/// scheduled velocity. Throws SimulationFault (with the step index) on
/// coincident agents, obstacle penetration or non-finite state.
World step(const World& world, const StepOptions& options = {},
           StepInfo* info = nullptr);

struct EnergyTerms {
  double potential = 0.0;  // V, collective repulsive potential
  double inertia = 0.0;    // c1 * J
  double kinetic = 0.0;    // K
  double total() const { return potential + inertia + kinetic; }
};

/// V(p) = 1/2 sum_{i != j} psi(|p_j - p_i|).
double collective_potential(std::span<const VecD> positions,
                            const ControlParams& params);
/// V + c1 * 1/2 sum |p_i - T_i|^2 + 1/2 sum |v_i|^2.
EnergyTerms hamiltonian(const World& world);

/// Smallest pairwise distance, +inf for fewer than two points.
double min_pairwise_distance(std::span<const VecD> points);

/// Exact per-step minimum separation. Reuses the previous minimum to bound
/// the grid cell size, so each update is near-linear in n.
class SeparationTracker {
 public:
  explicit SeparationTracker(double max_step_displacement)
      : max_step_(max_step_displacement) {}
  double update(std::span<const VecD> positions);

 private:
  double max_step_;
  double last_ = -1.0;
};

struct StepRecord {
  double t = 0.0;
  std::vector<VecD> positions;
  std::vector<VecD> velocities;
  double min_separation = 0.0;
  double max_goal_distance = 0.0;
  double hamiltonian = 0.0;
  std::vector<char> cap_active;
};

/// Diagnostics kept for every step (index 0 is the initial state).
struct StepSeries {
  std::vector<double> t;
  std::vector<double> min_separation;
  std::vector<double> max_goal_distance;
  std::vector<double> max_speed;
  std::vector<double> hamiltonian;
  std::vector<double> min_obstacle_clearance;
  /// Largest amount by which any agent exceeded its velocity limit (<= 0
  /// when every limit holds).
  std::vector<double> limit_excess;
  std::vector<std::size_t> cap_active_count;
};

struct RunOptions {
  /// Keep every k-th step in the trajectory (0 keeps none). The initial and
  /// final states are always kept when k > 0.
  std::size_t log_stride = 1;
  NeighborMode neighbors = NeighborMode::kAuto;
  WorkerPool* pool = nullptr;
  /// Stop once the run has taken this much wall-clock time (ms), diagnostics
  /// included; 0 means no limit.
  double wall_limit_ms = 0.0;
};

struct RunResult {
  std::vector<StepRecord> trajectory;
  StepSeries series;
  std::vector<VecD> targets;
  std::vector<VecD> final_positions;
  std::vector<VecD> final_velocities;
  bool converged = false;
  std::size_t steps = 0;
  double transition_time = 0.0;
  double execution_ms = 0.0;
  /// Stopped by RunOptions::wall_limit_ms before converging or timing out.
  bool aborted = false;
  std::optional<std::string> fault;
};

/// Optional tunables; unset fields take defaults or derived values.
struct ParamOverrides {
  std::optional<double> d_star;
  std::optional<VelocityLimit> v_limit;
  std::optional<double> rho;
  std::optional<double> c1;
  std::optional<double> c2;
  std::optional<double> dt;
  std::optional<double> end_max_dis;
  std::optional<double> max_sim_time;
  std::optional<double> rho_hat;
  std::optional<double> r_hat;
  std::optional<double> d_hat_star;
};

/// Scenario with its targets assigned and every parameter resolved.
struct PreparedRun {
  Scenario scenario;
  std::vector<VecD> targets;
  std::optional<Assignment> assignment;
  ControlParams params;
  ValidationReport validation;
};

/// xi = max_i |start_i - target_i|^2.
double max_squared_goal_distance(std::span<const VecD> starts,
                                 std::span<const VecD> targets);

/// Assigns targets (Hungarian unless preassigned), then derives xi, d, r,
/// r_hat and the default time limit. Does not throw on validation failure;
/// the report is returned in `validation`.
PreparedRun prepare(const Scenario& scenario, const ParamOverrides& overrides);

/// Runs the stepping loop until every agent is within end_max_dis of its
/// target or max_sim_time is reached. A fault mid-run ends the run and is
/// reported in RunResult::fault. Throws ConfigError if the scenario fails
/// validation.
RunResult run(const PreparedRun& prepared, const RunOptions& options = {});

/// Convenience form with explicit parameters: assigns targets when the
/// scenario is not preassigned, validates and runs.
RunResult run(const Scenario& scenario, const ControlParams& params,
              const RunOptions& options = {});

}  // namespace fmp
