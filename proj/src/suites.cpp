#include "fmp/suites.hpp"

#include <sstream>

namespace fmp {

namespace {

std::string num(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

double rho_of(const ParamOverrides& o) { return o.rho.value_or(ControlParams{}.rho); }

BenchCase circle_case(const std::string& suite, std::size_t n,
                      const ParamOverrides& params, double factor) {
  const double v = effective_v_max(*params.v_limit);
  const double radius =
      circle_radius_for(n, *params.d_star, v, rho_of(params), 2, factor);
  BenchCase c;
  c.suite = suite;
  c.label = suite + "-" + std::to_string(n);
  if (factor != kCircleSpacingFactor) c.label += "-x" + num(factor);
  c.scenario = circle_scenario(n, radius, 0.0);
  c.scenario.name = c.label;
  c.overrides = params;
  c.keys = {{"n", std::to_string(n)}, {"radius", num(radius)}};
  c.sparse = factor >= 3.0;
  return c;
}

std::vector<BenchCase> circle_suite(const SuiteOptions& o) {
  std::vector<BenchCase> out;
  const auto ns = o.n.empty() ? std::vector<std::size_t>{100} : o.n;
  for (std::size_t n : ns) {
    out.push_back(circle_case("circle", n, circle_params(), kCircleSpacingFactor));
  }
  if (o.n.empty()) {
    out.push_back(
        circle_case("circle", 100, circle_params(), kSparseCircleSpacingFactor));
  }
  return out;
}

std::vector<BenchCase> scale_suite(const SuiteOptions& o) {
  std::vector<BenchCase> out;
  const auto ns =
      o.n.empty() ? std::vector<std::size_t>{10, 100, 250, 500, 1000} : o.n;
  for (std::size_t n : ns) {
    out.push_back(circle_case("scale", n, scale_params(), kCircleSpacingFactor));
  }
  return out;
}

std::vector<BenchCase> swap_suite(const SuiteOptions& o) {
  std::vector<BenchCase> out;
  const auto spacings =
      o.spacing.empty() ? std::vector<double>{6.0, 6.5, 7.5, 8.5, 9.5} : o.spacing;
  std::vector<SwapKind> kinds{SwapKind::kMirror, SwapKind::kDiagonal};
  if (o.kind) kinds = {*o.kind};
  for (SwapKind kind : kinds) {
    const std::string kname = kind == SwapKind::kMirror ? "mirror" : "diagonal";
    for (double s : spacings) {
      BenchCase c;
      c.suite = "swap";
      c.label = "swap-" + kname + "-" + num(s);
      c.scenario = grid_swap_scenario(kind, 100, s, 0.0);
      c.scenario.name = c.label;
      c.overrides = swap_params();
      c.keys = {{"kind", kname}, {"spacing", num(s)}};
      c.sparse = s >= 9.5;
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<BenchCase> random_suite(const SuiteOptions& o, bool three_d) {
  std::vector<BenchCase> out;
  const std::string suite = three_d ? "scale3d" : "random";
  const ParamOverrides params = three_d ? scale3d_params() : random_params();
  for (std::size_t k = 0; k < o.cases; ++k) {
    const std::uint64_t seed = split_seed(o.seed, k);
    BenchCase c;
    c.suite = suite;
    c.label = suite + "-" + std::to_string(k);
    c.scenario = random_scenario(three_d ? random3d_spec(seed) : table3_spec(seed),
                                 params);
    c.scenario.name = c.label;
    c.overrides = params;
    c.seed = seed;
    c.keys = {{"case", std::to_string(k)}, {"seed", std::to_string(seed)}};
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<BenchCase> formation_suite(const SuiteOptions& o) {
  std::vector<BenchCase> out;
  const auto spacings =
      o.spacing.empty() ? std::vector<double>{12.0, 9.0, 6.0, 3.0, 1.0} : o.spacing;
  for (double s : spacings) {
    BenchCase c;
    c.suite = "formation";
    c.label = "formation-" + num(s);
    c.scenario = formation_scenario(28, s, 0.0);
    c.scenario.name = c.label;
    c.overrides = formation_params();
    c.keys = {{"spacing", num(s)}};
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "circle", "swap", "obstacle", "random", "formation", "scale3d", "scale"};
  return names;
}

RandomCaseSpec table3_spec(std::uint64_t seed) {
  RandomCaseSpec s;
  s.n = 30;
  s.box = {VecD(0.0, 0.0), VecD(40.0, 40.0)};
  s.seed = seed;
  return s;
}

RandomCaseSpec random3d_spec(std::uint64_t seed) {
  RandomCaseSpec s;
  s.n = 100;
  s.box = {VecD(0.0, 0.0, 0.0), VecD(60.0, 60.0, 30.0)};
  s.seed = seed;
  return s;
}

std::vector<BenchCase> make_suite(const std::string& name,
                                  const SuiteOptions& options) {
  if (name == "circle") return circle_suite(options);
  if (name == "scale") return scale_suite(options);
  if (name == "swap") return swap_suite(options);
  if (name == "random") return random_suite(options, false);
  if (name == "scale3d") return random_suite(options, true);
  if (name == "formation") return formation_suite(options);
  if (name == "obstacle") {
    BenchCase c;
    c.suite = "obstacle";
    c.label = "obstacle-passage";
    c.scenario = obstacle_passage_scenario();
    c.scenario.name = c.label;
    c.overrides = obstacle_passage_params();
    return {c};
  }
  std::string known;
  for (const auto& n : suite_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown suite '" + name + "' (known: " + known + ")");
}

}  // namespace fmp
