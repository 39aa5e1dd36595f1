#include "fmp/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "fmp/io.hpp"
#include "fmp/metrics.hpp"
#include "fmp/suites.hpp"

namespace fmp {

namespace fs = std::filesystem;

namespace {

constexpr const char* kExitFooter =
    "Exit status: 0 converged, 2 ran to the time limit without converging,\n"
    "1 configuration error or simulation fault. FMP_THREADS sets the default\n"
    "worker count when --threads is not given.";

// Command-line tunables, merged over whatever the scenario file or suite
// already sets.
struct ParamFlags {
  std::optional<double> d_star, v_max, rho, c1, c2, dt, end_max_dis,
      max_sim_time, rho_hat, r_hat, d_hat_star;
  std::vector<double> v_axes;

  void attach(CLI::App* app) {
    app->add_option("--d-star", d_star, "required minimum separation (m)");
    app->add_option("--v-max", v_max, "uniform speed limit (m/s)");
    app->add_option("--v-axes", v_axes, "per-axis limits horizontal,up,down (m/s)")
        ->delimiter(',')
        ->expected(3)
        ->excludes("--v-max");
    app->add_option("--rho", rho, "repulsive gradient");
    app->add_option("--c1", c1, "navigational position gain (1/s^2)");
    app->add_option("--c2", c2, "navigational damping gain (1/s)");
    app->add_option("--dt", dt, "time step (s)");
    app->add_option("--end-max-dis", end_max_dis, "convergence radius (m)");
    app->add_option("--max-sim-time", max_sim_time, "simulated time limit (s)");
    app->add_option("--rho-hat", rho_hat, "obstacle repulsive gradient");
    app->add_option("--r-hat", r_hat, "obstacle sensing range (m)");
    app->add_option("--d-hat-star", d_hat_star, "obstacle clearance (m)");
  }

  void apply(ParamOverrides& o) const {
    auto set = [](std::optional<double>& dst, const std::optional<double>& src) {
      if (src) dst = src;
    };
    set(o.d_star, d_star);
    if (v_max) o.v_limit = UniformLimit{*v_max};
    if (v_axes.size() == 3) o.v_limit = PerAxisLimit{v_axes[0], v_axes[1], v_axes[2]};
    set(o.rho, rho);
    set(o.c1, c1);
    set(o.c2, c2);
    set(o.dt, dt);
    set(o.end_max_dis, end_max_dis);
    set(o.max_sim_time, max_sim_time);
    set(o.rho_hat, rho_hat);
    set(o.r_hat, r_hat);
    set(o.d_hat_star, d_hat_star);
  }
};

struct GenFlags {
  std::size_t n = 0;  // 0: generator default
  double radius = 0.0;
  double spacing = 0.0;
  std::string kind = "mirror";
  std::uint64_t seed = 0;
  double jitter = 0.0;
  int dim = 2;

  void attach(CLI::App* app) {
    app->add_option("--n", n, "agent count");
    app->add_option("--radius", radius, "circle radius (m); default derived");
    app->add_option("--spacing", spacing, "swap or formation spacing (m)");
    app->add_option("--kind", kind, "swap kind")
        ->check(CLI::IsMember({"mirror", "diagonal"}));
    app->add_option("--seed", seed, "random seed");
    app->add_option("--jitter", jitter, "swap start jitter (m)");
    app->add_option("--dim", dim, "random arena dimension")
        ->check(CLI::IsMember({2, 3}));
  }
};

const std::vector<std::string> kGenerators{"circle", "swap", "random", "obstacle",
                                           "formation"};

ScenarioFile generate(const std::string& name, const GenFlags& g,
                      const ParamFlags& flags) {
  ScenarioFile f;
  if (name == "circle") {
    f.overrides = circle_params();
    flags.apply(f.overrides);
    const std::size_t n = g.n ? g.n : 100;
    const double radius =
        g.radius > 0.0 ? g.radius
                       : circle_radius_for(n, *f.overrides.d_star,
                                           effective_v_max(*f.overrides.v_limit),
                                           f.overrides.rho.value_or(ControlParams{}.rho),
                                           2, kCircleSpacingFactor);
    f.scenario = circle_scenario(n, radius, 0.0);
    f.scenario.name = "circle-" + std::to_string(n);
  } else if (name == "swap") {
    f.overrides = swap_params();
    const SwapKind kind = g.kind == "diagonal" ? SwapKind::kDiagonal : SwapKind::kMirror;
    f.scenario = grid_swap_scenario(kind, g.n ? g.n : 100,
                                    g.spacing > 0.0 ? g.spacing : 9.5, 0.0,
                                    g.jitter, g.seed);
    f.scenario.name = "swap-" + g.kind;
    if (g.jitter > 0.0) f.seed = g.seed;
  } else if (name == "random") {
    f.overrides = g.dim == 3 ? scale3d_params() : random_params();
    flags.apply(f.overrides);
    RandomCaseSpec spec = g.dim == 3 ? random3d_spec(g.seed) : table3_spec(g.seed);
    if (g.n) spec.n = g.n;
    f.scenario = random_scenario(spec, f.overrides);
    f.scenario.name = g.dim == 3 ? "random3d" : "random";
    f.seed = g.seed;
  } else if (name == "obstacle") {
    f.overrides = obstacle_passage_params();
    f.scenario = obstacle_passage_scenario();
    f.scenario.name = "obstacle-passage";
  } else if (name == "formation") {
    f.overrides = formation_params();
    f.scenario = formation_scenario(g.n ? g.n : 28, g.spacing > 0.0 ? g.spacing : 12.0,
                                    0.0);
    f.scenario.name = "formation";
  } else {
    throw ConfigError("unknown generator '" + name + "'");
  }
  flags.apply(f.overrides);
  return f;
}

NeighborMode parse_neighbors(const std::string& s) {
  if (s == "brute") return NeighborMode::kBruteForce;
  if (s == "grid") return NeighborMode::kGrid;
  return NeighborMode::kAuto;
}

int exit_code(const RunMetrics& m) {
  if (m.faulted) return kExitError;
  return m.converged ? kExitConverged : kExitNotConverged;
}

std::string jsonl_of(const RunResult& r) {
  std::ostringstream s;
  write_trajectory_jsonl(s, r.trajectory);
  return s.str();
}

void print_summary(std::ostream& out, const PreparedRun& p, const RunResult& r,
                   const RunMetrics& m) {
  out << p.scenario.name << ": n=" << p.scenario.size() << " d=" << p.params.d
      << " r=" << p.params.r << "\n"
      << "  converged=" << (m.converged ? "yes" : "no")
      << " transition_time=" << m.transition_time << " s"
      << " lbt_opt=" << m.lbt_opt << " s"
      << " execution_time=" << m.execution_time << " ms\n"
      << "  min_separation=" << m.min_separation << " (d*=" << p.params.d_star
      << ") min_obstacle_clearance=" << m.min_obstacle_clearance
      << " deadlock=" << m.deadlock << " livelock=" << m.livelock << "\n";
  if (r.fault) out << "  fault: " << *r.fault << "\n";
}

// ---- run ------------------------------------------------------------------

struct RunFlags {
  std::string scenario_path;
  std::string generator;
  std::string out_dir;
  std::size_t log_stride = 1;
  int threads = 0;
  std::string neighbors = "auto";
  ParamFlags params;
  GenFlags gen;
};

int cmd_run(const RunFlags& f, std::ostream& out, std::ostream& err) {
  ScenarioFile file;
  if (!f.scenario_path.empty()) {
    file = load_scenario(f.scenario_path);
    f.params.apply(file.overrides);
  } else {
    file = generate(f.generator, f.gen, f.params);
  }

  const PreparedRun prepared = prepare(file.scenario, file.overrides);
  if (!prepared.validation.ok()) {
    err << "invalid scenario " << prepared.scenario.name << ":\n"
        << prepared.validation.to_string();
    return kExitError;
  }
  WorkerPool pool(f.threads);
  RunOptions ro;
  ro.log_stride = f.log_stride;
  ro.neighbors = parse_neighbors(f.neighbors);
  ro.pool = &pool;
  const RunResult result = run(prepared, ro);
  const RunMetrics m = summarize(result, prepared.scenario, prepared.params);

  if (!f.out_dir.empty()) {
    const fs::path dir(f.out_dir);
    write_file(dir / "scenario.json", scenario_to_json(file));
    write_file(dir / "trajectory.jsonl", jsonl_of(result));
    std::ostringstream csv;
    write_trajectory_csv(csv, prepared.params.dim, result.trajectory);
    write_file(dir / "trajectory.csv", csv.str());
    write_file(dir / "metrics.json",
               metrics_to_json(m, prepared.params, prepared.scenario, file.seed,
                               f.log_stride));
  }
  print_summary(out, prepared, result, m);
  return exit_code(m);
}

// ---- gen ------------------------------------------------------------------

int cmd_gen(const std::string& name, const GenFlags& g, const ParamFlags& params,
            const std::string& out_path, std::ostream& out) {
  const ScenarioFile f = generate(name, g, params);
  const std::string text = scenario_to_json(f);
  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    write_file(out_path, text);
  }
  return kExitConverged;
}

// ---- replay-check ---------------------------------------------------------

int cmd_replay(const std::string& dir_name, std::vector<int> threads,
               std::ostream& out, std::ostream& err) {
  const fs::path dir(dir_name);
  const ScenarioFile file = load_scenario(dir / "scenario.json");
  const std::string recorded = read_file(dir / "trajectory.jsonl");
  const auto metrics = nlohmann::json::parse(read_file(dir / "metrics.json"));
  const std::size_t stride = metrics.value("log_stride", std::size_t{1});
  if (threads.empty()) {
    const int all = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = {1, 2, all};
  }
  std::sort(threads.begin(), threads.end());
  threads.erase(std::unique(threads.begin(), threads.end()), threads.end());
  const PreparedRun prepared = prepare(file.scenario, file.overrides);
  if (!prepared.validation.ok()) {
    err << prepared.validation.to_string();
    return kExitError;
  }
  bool same = true;
  for (int t : threads) {
    WorkerPool pool(t);
    RunOptions ro;
    ro.log_stride = stride;
    ro.pool = &pool;
    const std::string replayed = jsonl_of(run(prepared, ro));
    const bool ok = replayed == recorded;
    out << "threads=" << t << ": " << (ok ? "identical" : "DIFFERS") << " ("
        << replayed.size() << " bytes)\n";
    same = same && ok;
  }
  return same ? kExitConverged : kExitError;
}

// ---- bench ----------------------------------------------------------------

struct BenchFlags {
  std::string suite;
  std::vector<std::size_t> n;
  std::vector<double> spacing;
  std::string kind;
  std::size_t cases = 20;
  std::uint64_t seed = 0;
  std::string out_dir;
  int threads = 0;
  int jobs = 0;
  ParamFlags params;
};

struct BenchRow {
  BenchCase bench;
  ControlParams params;
  RunMetrics metrics;
  std::string error;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string bench_table(const std::vector<BenchRow>& rows) {
  std::ostringstream t;
  t.precision(10);
  t << "suite,label";
  if (!rows.empty()) {
    for (const auto& [k, v] : rows.front().bench.keys) t << "," << k;
  }
  t << ",n,converged,deadlock,livelock,faulted,transition_time_s,"
       "execution_time_ms,lbt_opt_s,min_separation_m,d_star_m,"
       "min_obstacle_clearance_m,energy_violations,steps\n";
  for (const auto& row : rows) {
    const RunMetrics& m = row.metrics;
    t << row.bench.suite << "," << csv_field(row.bench.label);
    for (const auto& [k, v] : row.bench.keys) t << "," << csv_field(v);
    t << "," << row.bench.scenario.size() << "," << m.converged << "," << m.deadlock
      << "," << m.livelock << "," << (m.faulted || !row.error.empty()) << ","
      << m.transition_time << "," << m.execution_time << "," << m.lbt_opt << ","
      << m.min_separation << "," << row.params.d_star << ","
      << m.min_obstacle_clearance << "," << m.energy_violations << "," << m.steps
      << "\n";
  }
  return t.str();
}

int cmd_bench(const BenchFlags& f, std::ostream& out, std::ostream& err) {
  SuiteOptions so;
  so.n = f.n;
  so.spacing = f.spacing;
  if (f.kind == "mirror") so.kind = SwapKind::kMirror;
  if (f.kind == "diagonal") so.kind = SwapKind::kDiagonal;
  so.cases = f.cases;
  so.seed = f.seed;
  std::vector<BenchRow> rows;
  for (auto& c : make_suite(f.suite, so)) {
    BenchRow row;
    f.params.apply(c.overrides);
    row.bench = std::move(c);
    rows.push_back(std::move(row));
  }

  // Whole runs in parallel; within a run, steps use the step pool only when
  // runs are not already spread over the workers.
  const int jobs = f.jobs > 0 ? f.jobs : (f.threads > 0 ? f.threads : default_thread_count());
  WorkerPool batch(jobs);
  std::unique_ptr<WorkerPool> step_pool;
  if (jobs == 1) step_pool = std::make_unique<WorkerPool>(f.threads);
  batch.parallel_for(rows.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      BenchRow& row = rows[k];
      try {
        const PreparedRun p = prepare(row.bench.scenario, row.bench.overrides);
        row.params = p.params;
        if (!p.validation.ok()) {
          row.error = p.validation.to_string();
          row.metrics.faulted = true;
          continue;
        }
        RunOptions ro;
        ro.log_stride = 0;
        ro.pool = step_pool.get();
        const RunResult r = run(p, ro);
        row.metrics = summarize(r, p.scenario, p.params);
        if (r.fault) row.error = *r.fault;
      } catch (const std::exception& e) {
        row.error = e.what();
        row.metrics.faulted = true;
      }
    }
  }, 1);

  const std::string table = bench_table(rows);
  out << table;
  std::size_t converged = 0, deadlocks = 0, livelocks = 0, faults = 0;
  for (const auto& row : rows) {
    converged += row.metrics.converged;
    deadlocks += row.metrics.deadlock;
    livelocks += row.metrics.livelock;
    faults += row.metrics.faulted || !row.error.empty();
    if (!row.error.empty()) err << row.bench.label << ": " << row.error << "\n";
  }
  out << "# runs=" << rows.size() << " converged=" << converged
      << " deadlocks=" << deadlocks << " livelocks=" << livelocks
      << " faults=" << faults << "\n";

  if (!f.out_dir.empty()) {
    const fs::path dir(f.out_dir);
    write_file(dir / "summary.csv", table);
    std::string runs;
    for (const auto& row : rows) {
      runs += metrics_to_json(row.metrics, row.params, row.bench.scenario,
                              row.bench.seed, 0, -1);
    }
    write_file(dir / "runs.jsonl", runs);
  }
  if (faults) return kExitError;
  return converged == rows.size() ? kExitConverged : kExitNotConverged;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Force-based motion planning simulator and benchmark driver", "fmp"};
  app.footer(kExitFooter);
  app.require_subcommand(1);

  RunFlags rf;
  auto* run_cmd = app.add_subcommand("run", "simulate one scenario and write artifacts");
  auto* src = run_cmd->add_option("--scenario", rf.scenario_path, "scenario JSON file");
  run_cmd->add_option("--gen", rf.generator, "built-in generator instead of a file")
      ->check(CLI::IsMember(kGenerators))
      ->excludes(src);
  run_cmd->add_option("--out", rf.out_dir, "output directory for artifacts");
  run_cmd->add_option("--log-stride", rf.log_stride, "keep every k-th step in the log")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--threads", rf.threads, "step workers (0: all cores)")
      ->envname("FMP_THREADS");
  run_cmd->add_option("--neighbors", rf.neighbors, "neighbor search")
      ->check(CLI::IsMember({"auto", "brute", "grid"}));
  rf.params.attach(run_cmd);
  rf.gen.attach(run_cmd);

  std::string gen_name, gen_out;
  GenFlags gf;
  ParamFlags gp;
  auto* gen_cmd = app.add_subcommand("gen", "emit a scenario JSON from a generator");
  gen_cmd->add_option("generator", gen_name, "circle, swap, random, obstacle, formation")
      ->required()
      ->check(CLI::IsMember(kGenerators));
  gen_cmd->add_option("-o,--out", gen_out, "output file (default stdout)");
  gf.attach(gen_cmd);
  gp.attach(gen_cmd);

  std::string replay_dir;
  std::vector<int> replay_threads;
  auto* replay_cmd = app.add_subcommand(
      "replay-check", "re-run a recorded run and compare trajectory bytes");
  replay_cmd->add_option("dir", replay_dir, "directory written by `fmp run --out`")
      ->required();
  replay_cmd->add_option("--threads", replay_threads,
                         "worker counts to try (default 1,2,all)")
      ->delimiter(',');

  BenchFlags bf;
  auto* bench_cmd = app.add_subcommand("bench", "run a built-in benchmark suite");
  bench_cmd->add_option("suite", bf.suite, "circle, swap, obstacle, random, formation, scale3d, scale")
      ->required();
  bench_cmd->add_option("--n", bf.n, "agent counts (circle, scale)")->delimiter(',');
  bench_cmd->add_option("--spacing", bf.spacing, "spacings (swap, formation)")
      ->delimiter(',');
  bench_cmd->add_option("--kind", bf.kind, "swap kind")
      ->check(CLI::IsMember({"mirror", "diagonal"}));
  bench_cmd->add_option("--cases", bf.cases, "instances (random, scale3d)");
  bench_cmd->add_option("--seed", bf.seed, "base seed (random, scale3d)");
  bench_cmd->add_option("--out", bf.out_dir, "write summary.csv and runs.jsonl here");
  bench_cmd->add_option("--threads", bf.threads, "workers (0: all cores)")
      ->envname("FMP_THREADS");
  bench_cmd->add_option("--jobs", bf.jobs, "concurrent runs (default: --threads)");
  bf.params.attach(bench_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitConverged : kExitError;
  }

  try {
    if (*run_cmd) {
      if (rf.scenario_path.empty() && rf.generator.empty()) {
        err << "run: need --scenario FILE or --gen NAME\n";
        return kExitError;
      }
      return cmd_run(rf, out, err);
    }
    if (*gen_cmd) return cmd_gen(gen_name, gf, gp, gen_out, out);
    if (*replay_cmd) return cmd_replay(replay_dir, replay_threads, out, err);
    if (*bench_cmd) return cmd_bench(bf, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace fmp
