#include "fmp/simulator.hpp"

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

#include "fmp/metrics.hpp"
#include "fmp/spatial_grid.hpp"

namespace fmp {

// The global control lifts TBB's worker limit when more threads are asked
// for than there are cores.
struct WorkerPool::Arena {
  explicit Arena(int n)
      : limit(tbb::global_control::max_allowed_parallelism,
              static_cast<std::size_t>(std::max(n, tbb::info::default_concurrency()))),
        arena(n) {}
  tbb::global_control limit;
  tbb::task_arena arena;
};

WorkerPool::WorkerPool(int threads)
    : threads_(threads > 0 ? threads : tbb::info::default_concurrency()),
      arena_(std::make_unique<Arena>(threads_)) {}

WorkerPool::~WorkerPool() = default;

void WorkerPool::parallel_for(
    std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
    std::size_t grain) {
  if (threads_ == 1 || n < 2) {
    fn(0, n);
    return;
  }
  arena_->arena.execute([&] {
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n, std::max<std::size_t>(grain, 1)),
                      [&](const tbb::blocked_range<std::size_t>& range) {
                        fn(range.begin(), range.end());
                      });
  });
}

int default_thread_count() {
  if (const char* env = std::getenv("FMP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

World make_world(const Scenario& scenario, std::vector<VecD> targets,
                 const ControlParams& params) {
  World w;
  w.positions = scenario.starts;
  w.velocities.assign(scenario.starts.size(), VecD::zero(scenario.dim));
  w.targets = std::move(targets);
  w.obstacles = scenario.obstacles;
  w.params = params;
  return w;
}

namespace {

bool use_grid(NeighborMode mode, std::size_t n) {
  return mode == NeighborMode::kGrid ||
         (mode == NeighborMode::kAuto && n >= kGridThreshold);
}

[[noreturn]] void rethrow_with_step(std::exception_ptr e, std::size_t step) {
  try {
    std::rethrow_exception(e);
  } catch (const SimulationFault& f) {
    throw SimulationFault("step " + std::to_string(step) + ": " + f.what(),
                          static_cast<long>(step), f.first(), f.second());
  }
}

}  // namespace

World step(const World& world, const StepOptions& options, StepInfo* info) {
  const std::size_t n = world.size();
  const ControlParams& params = world.params;
  const WorldSnapshot snap = world.snapshot();

  std::optional<SpatialGrid> grid;
  if (use_grid(options.neighbors, n)) grid.emplace(world.positions, params.r);

  World next;
  next.positions.resize(n);
  next.velocities.resize(n);
  std::vector<char> capped(n, 0);
  std::vector<std::exception_ptr> faults(n);

  auto body = [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> cand;
    for (std::size_t i = begin; i < end; ++i) {
      try {
        ForceBreakdown u;
        if (grid) {
          grid->candidates(world.positions[i], cand);
          u = control_input(i, snap, params, cand);
        } else {
          u = control_input(i, snap, params);
        }
        const VecD v = world.velocities[i] + u.total * params.dt;
        capped[i] = cap_active(v, params.v_limit) ? 1 : 0;
        next.velocities[i] = capped[i] ? cap_velocity(v, params.v_limit) : v;
        next.positions[i] = world.positions[i] + next.velocities[i] * params.dt;
      } catch (...) {
        faults[i] = std::current_exception();
      }
    }
  };
  if (options.pool != nullptr) {
    options.pool->parallel_for(n, body);
  } else {
    body(0, n);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (faults[i]) rethrow_with_step(faults[i], world.step_index);
    if (!next.positions[i].is_finite() || !next.velocities[i].is_finite()) {
      throw SimulationFault("step " + std::to_string(world.step_index) +
                                ": agent " + std::to_string(i) +
                                " has a non-finite state",
                            static_cast<long>(world.step_index),
                            static_cast<long>(i));
    }
  }

  next.step_index = world.step_index + 1;
  next.time = static_cast<double>(next.step_index) * params.dt;
  next.targets = world.targets;
  next.obstacles = world.obstacles;
  for (auto& o : next.obstacles) {
    o.center += o.velocity_at(world.time) * params.dt;
  }
  next.params = params;
  if (info != nullptr) info->cap_active = std::move(capped);
  return next;
}

double collective_potential(std::span<const VecD> positions,
                            const ControlParams& params) {
  const std::size_t n = positions.size();
  double total = 0.0;
  auto add_pair = [&](std::size_t i, std::size_t j) {
    const double z = distance(positions[i], positions[j]);
    if (z >= params.r) return;
    if (z < kCoincidentDistance) {
      throw SimulationFault("agents " + std::to_string(i) + " and " +
                                std::to_string(j) + " are coincident",
                            -1, static_cast<long>(i), static_cast<long>(j));
    }
    // (i, j) and (j, i) both appear in the double sum, cancelling the 1/2.
    total += repulsive_potential(z, params.r, params.rho);
  };
  if (n < kGridThreshold) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) add_pair(i, j);
    }
  } else {
    SpatialGrid grid(positions, params.r);
    grid.for_each_candidate_pair(add_pair);
  }
  return total;
}

EnergyTerms hamiltonian(const World& world) {
  EnergyTerms e;
  e.potential = collective_potential(world.positions, world.params);
  double j = 0.0;
  double k = 0.0;
  for (std::size_t i = 0; i < world.size(); ++i) {
    j += squared_distance(world.positions[i], world.targets[i]);
    k += world.velocities[i].squared_norm();
  }
  e.inertia = world.params.c1 * 0.5 * j;
  e.kinetic = 0.5 * k;
  return e;
}

double min_pairwise_distance(std::span<const VecD> points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      best = std::min(best, distance(points[i], points[j]));
    }
  }
  return best;
}

double SeparationTracker::update(std::span<const VecD> positions) {
  constexpr std::size_t kBruteForceBelow = 64;
  if (positions.size() < 2) return std::numeric_limits<double>::infinity();
  if (last_ < 0.0 || positions.size() < kBruteForceBelow) {
    last_ = min_pairwise_distance(positions);
    return last_;
  }
  // The pair that realized the previous minimum moved apart by at most
  // 2 * max_step, so the new minimum is no larger than this cell size.
  const double cell = (last_ + 2.0 * max_step_) * (1.0 + 1e-9) + 1e-12;
  SpatialGrid grid(positions, cell);
  double best = std::numeric_limits<double>::infinity();
  grid.for_each_candidate_pair([&](std::size_t i, std::size_t j) {
    best = std::min(best, distance(positions[i], positions[j]));
  });
  if (best > cell) best = min_pairwise_distance(positions);
  last_ = best;
  return best;
}

double max_squared_goal_distance(std::span<const VecD> starts,
                                 std::span<const VecD> targets) {
  double xi = 0.0;
  for (std::size_t i = 0; i < starts.size() && i < targets.size(); ++i) {
    xi = std::max(xi, squared_distance(starts[i], targets[i]));
  }
  return xi;
}

PreparedRun prepare(const Scenario& scenario, const ParamOverrides& o) {
  PreparedRun out;
  out.scenario = scenario;
  ControlParams& p = out.params;
  p.dim = scenario.dim;
  p.d_star = o.d_star.value_or(p.d_star);
  p.v_limit = o.v_limit.value_or(p.v_limit);
  p.rho = o.rho.value_or(p.rho);
  p.c1 = o.c1.value_or(p.c1);
  p.c2 = o.c2.value_or(2.0 * std::sqrt(p.c1));
  p.dt = o.dt.value_or(p.dt);
  p.end_max_dis = o.end_max_dis.value_or(p.end_max_dis);
  p.rho_hat = o.rho_hat.value_or(p.rho);
  p.d_hat_star = o.d_hat_star.value_or(p.d_hat_star);
  check_velocity_limit(p.v_limit, p.dim);
  const double v_eff = p.v_max_eff();

  const bool sizes_ok =
      !scenario.starts.empty() && scenario.starts.size() == scenario.goals.size();
  if (sizes_ok && !scenario.preassigned) {
    out.assignment = hungarian_assign(scenario.starts, scenario.goals);
    out.targets = apply_assignment(scenario.goals, out.assignment->perm);
  } else {
    out.targets = scenario.goals;
  }

  const std::size_t n = std::max<std::size_t>(scenario.starts.size(), 1);
  p.xi = max_squared_goal_distance(scenario.starts, out.targets);
  p.d = d_from_dstar(p.d_star, n, p.xi, v_eff, p.rho, p.dim);
  p.r = comm_radius(v_eff, p.rho, p.d);
  p.r_hat = o.r_hat.value_or(obstacle_range(p.d_hat_star, v_eff, p.rho_hat));
  if (o.max_sim_time) {
    p.max_sim_time = *o.max_sim_time;
  } else {
    const double lbt = sizes_ok ? lbt_opt(scenario.starts, out.targets, v_eff) : 0.0;
    p.max_sim_time = std::max(60.0, 10.0 * lbt);
  }
  p.validate();
  out.validation = validate_scenario(scenario, p);
  return out;
}

namespace {

double limit_excess(const VecD& v, const VelocityLimit& limit) {
  if (const auto* u = std::get_if<UniformLimit>(&limit)) return v.norm() - u->v_max;
  const auto& a = std::get<PerAxisLimit>(limit);
  return std::max({std::sqrt(v[0] * v[0] + v[1] * v[1]) - a.horizontal, v[2] - a.up,
                   -v[2] - a.down});
}

double max_goal_distance(const World& w) {
  double m = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    m = std::max(m, distance(w.positions[i], w.targets[i]));
  }
  return m;
}

class Recorder {
 public:
  Recorder(RunResult& out, std::size_t stride, double max_step)
      : out_(out), stride_(stride), tracker_(max_step) {}

  // Returns the max goal distance of the recorded state.
  double record(const World& w, const std::vector<char>& capped, bool force_log) {
    const double goal = max_goal_distance(w);
    const double sep = tracker_.update(w.positions);
    const double h = hamiltonian(w).total();
    double speed = 0.0;
    double excess = -std::numeric_limits<double>::infinity();
    for (const auto& v : w.velocities) {
      speed = std::max(speed, v.norm());
      excess = std::max(excess, limit_excess(v, w.params.v_limit));
    }
    double clearance = std::numeric_limits<double>::infinity();
    for (const auto& o : w.obstacles) {
      for (const auto& p : w.positions) {
        clearance = std::min(clearance, o.surface_distance(p));
      }
    }
    auto& s = out_.series;
    s.t.push_back(w.time);
    s.min_separation.push_back(sep);
    s.max_goal_distance.push_back(goal);
    s.max_speed.push_back(speed);
    s.hamiltonian.push_back(h);
    s.min_obstacle_clearance.push_back(clearance);
    s.limit_excess.push_back(excess);
    s.cap_active_count.push_back(
        static_cast<std::size_t>(std::count(capped.begin(), capped.end(), 1)));
    if (stride_ > 0 && (w.step_index % stride_ == 0 || force_log)) {
      log(w, capped, sep, goal, h);
    }
    return goal;
  }

  void ensure_final_logged(const World& w, const std::vector<char>& capped) {
    if (stride_ == 0) return;
    if (!out_.trajectory.empty() && out_.trajectory.back().t == w.time) return;
    const auto& s = out_.series;
    log(w, capped, s.min_separation.back(), s.max_goal_distance.back(),
        s.hamiltonian.back());
  }

 private:
  void log(const World& w, const std::vector<char>& capped, double sep,
           double goal, double h) {
    StepRecord rec;
    rec.t = w.time;
    rec.positions = w.positions;
    rec.velocities = w.velocities;
    rec.min_separation = sep;
    rec.max_goal_distance = goal;
    rec.hamiltonian = h;
    rec.cap_active = capped;
    out_.trajectory.push_back(std::move(rec));
  }

  RunResult& out_;
  std::size_t stride_;
  SeparationTracker tracker_;
};

}  // namespace

RunResult run(const PreparedRun& prepared, const RunOptions& options) {
  if (!prepared.validation.ok()) {
    throw ConfigError("scenario validation failed: " +
                      prepared.validation.to_string());
  }
  const ControlParams& params = prepared.params;
  for (std::size_t k = 0; k < prepared.scenario.obstacles.size(); ++k) {
    for (std::size_t i = 0; i < prepared.scenario.size(); ++i) {
      if (!(prepared.scenario.obstacles[k].surface_distance(
                prepared.scenario.starts[i]) > 0.0)) {
        throw ConfigError("start " + std::to_string(i) +
                          " is inside obstacle " + std::to_string(k));
      }
    }
  }

  RunResult out;
  out.targets = prepared.targets;
  World w = make_world(prepared.scenario, prepared.targets, params);
  Recorder recorder(out, options.log_stride, max_speed(params.v_limit) * params.dt);
  std::vector<char> capped(w.size(), 0);
  double goal = recorder.record(w, capped, true);
  out.converged = goal < params.end_max_dis;

  const auto max_steps = static_cast<std::size_t>(
      std::ceil(params.max_sim_time / params.dt - 1e-9));
  const StepOptions step_options{options.neighbors, options.pool};
  StepInfo info;
  using Clock = std::chrono::steady_clock;
  Clock::duration busy{};
  const auto loop_start = Clock::now();
  try {
    while (!out.converged && w.step_index < max_steps) {
      const auto t0 = Clock::now();
      w = step(w, step_options, &info);
      goal = max_goal_distance(w);
      busy += Clock::now() - t0;
      out.converged = goal < params.end_max_dis;
      recorder.record(w, info.cap_active, out.converged);
      capped = info.cap_active;
      if (options.wall_limit_ms > 0.0 && !out.converged &&
          std::chrono::duration<double, std::milli>(Clock::now() - loop_start).count() >
              options.wall_limit_ms) {
        out.aborted = true;
        break;
      }
    }
  } catch (const SimulationFault& f) {
    out.fault = f.what();
  }
  recorder.ensure_final_logged(w, capped);

  out.steps = w.step_index;
  out.transition_time = w.time;
  out.execution_ms = std::chrono::duration<double, std::milli>(busy).count();
  out.final_positions = w.positions;
  out.final_velocities = w.velocities;
  return out;
}

RunResult run(const Scenario& scenario, const ControlParams& params,
              const RunOptions& options) {
  PreparedRun p;
  p.scenario = scenario;
  p.params = params;
  params.validate();
  if (!scenario.preassigned && !scenario.starts.empty() &&
      scenario.starts.size() == scenario.goals.size()) {
    p.assignment = hungarian_assign(scenario.starts, scenario.goals);
    p.targets = apply_assignment(scenario.goals, p.assignment->perm);
  } else {
    p.targets = scenario.goals;
  }
  p.validation = validate_scenario(scenario, params);
  return run(p, options);
}

}  // namespace fmp
