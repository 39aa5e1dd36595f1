#include "fmp/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace fmp {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& source, const std::string& path,
                              const std::string& what) {
  throw ConfigError(source + ": field '" + path + "': " + what);
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text,
                                             std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Reads fields out of one JSON object, remembering which keys were used so
// typos can be reported.
class Reader {
 public:
  Reader(const json& j, std::string source, std::string path)
      : j_(j), source_(std::move(source)), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    field_error(source_, path.empty() ? "<root>" : path, what);
  }
  std::string at(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  const json* find(const std::string& key) {
    seen_.push_back(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const json& need(const std::string& key) {
    const json* v = find(key);
    if (!v) fail(at(key), "missing");
    return *v;
  }

  double real(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
  }
  std::optional<double> opt_real(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    return real(*v, at(key));
  }
  VecD vec(const json& v, const std::string& path, int dim) const {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    if (static_cast<int>(v.size()) != dim) {
      fail(path, "expected " + std::to_string(dim) + " components, got " +
                     std::to_string(v.size()));
    }
    std::vector<double> c;
    for (std::size_t k = 0; k < v.size(); ++k) {
      c.push_back(real(v[k], path + "[" + std::to_string(k) + "]"));
    }
    return VecD::from(c);
  }
  std::vector<VecD> points(const std::string& key, int dim) {
    const json& v = need(key);
    if (!v.is_array()) fail(at(key), "expected an array of points");
    std::vector<VecD> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(vec(v[i], at(key) + "[" + std::to_string(i) + "]", dim));
    }
    return out;
  }

  void reject_unknown() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) {
        fail(at(it.key()), "unknown field");
      }
    }
  }

  const std::string& source() const { return source_; }

 private:
  const json& j_;
  std::string source_;
  std::string path_;
  std::vector<std::string> seen_;
};

VelocityLimit read_limit(Reader& r, const json& v, const std::string& path) {
  if (v.is_number()) return UniformLimit{r.real(v, path)};
  Reader o(v, r.source(), path);
  PerAxisLimit a;
  a.horizontal = o.real(o.need("horizontal"), o.at("horizontal"));
  a.up = o.real(o.need("up"), o.at("up"));
  a.down = o.real(o.need("down"), o.at("down"));
  o.reject_unknown();
  return a;
}

Obstacle read_obstacle(const json& v, const std::string& source,
                       const std::string& path, int dim) {
  Reader o(v, source, path);
  Obstacle ob;
  ob.center = o.vec(o.need("center"), o.at("center"), dim);
  ob.radius = o.real(o.need("radius"), o.at("radius"));
  if (!(ob.radius > 0.0)) o.fail(o.at("radius"), "must be > 0");
  if (const json* vel = o.find("velocity")) {
    ob.velocity = o.vec(*vel, o.at("velocity"), dim);
  } else {
    ob.velocity = VecD::zero(dim);
  }
  if (const json* sch = o.find("schedule")) {
    if (!sch->is_array()) o.fail(o.at("schedule"), "expected an array");
    double last = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sch->size(); ++k) {
      const std::string sp = o.at("schedule") + "[" + std::to_string(k) + "]";
      Reader s((*sch)[k], source, sp);
      VelocitySegment seg;
      seg.t = s.real(s.need("t"), s.at("t"));
      seg.velocity = s.vec(s.need("velocity"), s.at("velocity"), dim);
      s.reject_unknown();
      if (!(seg.t > last)) s.fail(s.at("t"), "segment times must increase");
      last = seg.t;
      ob.schedule.push_back(seg);
    }
  }
  o.reject_unknown();
  return ob;
}

json vec_json(const VecD& v) {
  json a = json::array();
  for (int k = 0; k < v.dim(); ++k) a.push_back(v[k]);
  return a;
}

json limit_json(const VelocityLimit& limit) {
  if (const auto* u = std::get_if<UniformLimit>(&limit)) return u->v_max;
  const auto& a = std::get<PerAxisLimit>(limit);
  return {{"horizontal", a.horizontal}, {"up", a.up}, {"down", a.down}};
}

json real_json(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

void append_vec(std::string& out, const VecD& v) {
  out += '[';
  for (int k = 0; k < v.dim(); ++k) {
    if (k) out += ',';
    out += format_real(v[k]);
  }
  out += ']';
}

}  // namespace

ScenarioFile parse_scenario(std::string_view text, const std::string& source) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError(source + ":" + std::to_string(line) + ":" +
                      std::to_string(col) + ": malformed JSON: " + e.what());
  }

  Reader r(root, source, "");
  ScenarioFile file;
  Scenario& s = file.scenario;
  const json& dim = r.need("dim");
  if (!dim.is_number_integer() || (dim.get<int>() != 2 && dim.get<int>() != 3)) {
    r.fail("dim", "must be 2 or 3");
  }
  s.dim = dim.get<int>();
  if (const json* name = r.find("name")) {
    if (!name->is_string()) r.fail("name", "expected a string");
    s.name = name->get<std::string>();
  }
  s.starts = r.points("starts", s.dim);
  s.goals = r.points("goals", s.dim);
  if (s.starts.size() != s.goals.size()) {
    r.fail("goals", "expected " + std::to_string(s.starts.size()) +
                        " goals to match starts, got " +
                        std::to_string(s.goals.size()));
  }
  if (s.starts.empty()) r.fail("starts", "need at least one agent");
  if (const json* obs = r.find("obstacles")) {
    if (!obs->is_array()) r.fail("obstacles", "expected an array");
    for (std::size_t k = 0; k < obs->size(); ++k) {
      s.obstacles.push_back(read_obstacle(
          (*obs)[k], source, "obstacles[" + std::to_string(k) + "]", s.dim));
    }
  }
  if (const json* pre = r.find("preassigned")) {
    if (!pre->is_boolean()) r.fail("preassigned", "expected true or false");
    s.preassigned = pre->get<bool>();
  }
  if (const json* seed = r.find("seed")) {
    if (!seed->is_number_unsigned()) r.fail("seed", "expected a non-negative integer");
    file.seed = seed->get<std::uint64_t>();
  }

  ParamOverrides& o = file.overrides;
  o.d_star = r.opt_real("d_star");
  if (const json* v = r.find("v_max")) {
    o.v_limit = read_limit(r, *v, "v_max");
    try {
      check_velocity_limit(*o.v_limit, s.dim);
    } catch (const ConfigError& e) {
      r.fail("v_max", e.what());
    }
  }
  o.c1 = r.opt_real("c1");
  o.c2 = r.opt_real("c2");
  o.rho = r.opt_real("rho");
  o.dt = r.opt_real("dt");
  o.end_max_dis = r.opt_real("end_max_dis");
  o.max_sim_time = r.opt_real("max_sim_time");
  o.rho_hat = r.opt_real("rho_hat");
  o.r_hat = r.opt_real("r_hat");
  o.d_hat_star = r.opt_real("d_hat_star");
  r.reject_unknown();
  return file;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path), path.string());
}

std::string scenario_to_json(const ScenarioFile& file) {
  const Scenario& s = file.scenario;
  // Hand-laid so that each point or obstacle sits on one line.
  std::vector<std::pair<std::string, std::string>> fields;
  auto add = [&](const std::string& key, const json& v) { fields.push_back({key, v.dump()}); };
  auto add_list = [&](const std::string& key, const std::vector<json>& items) {
    std::string text = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
      text += (i ? ",\n    " : "\n    ") + items[i].dump();
    }
    fields.push_back({key, text + (items.empty() ? "]" : "\n  ]")});
  };
  add("name", s.name);
  add("dim", s.dim);
  add("preassigned", s.preassigned);
  if (file.seed) add("seed", *file.seed);
  const ParamOverrides& o = file.overrides;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) add(key, *v);
  };
  put("d_star", o.d_star);
  if (o.v_limit) add("v_max", limit_json(*o.v_limit));
  put("c1", o.c1);
  put("c2", o.c2);
  put("rho", o.rho);
  put("dt", o.dt);
  put("end_max_dis", o.end_max_dis);
  put("max_sim_time", o.max_sim_time);
  put("rho_hat", o.rho_hat);
  put("r_hat", o.r_hat);
  put("d_hat_star", o.d_hat_star);
  std::vector<json> items;
  for (const auto& p : s.starts) items.push_back(vec_json(p));
  add_list("starts", items);
  items.clear();
  for (const auto& p : s.goals) items.push_back(vec_json(p));
  add_list("goals", items);
  if (!s.obstacles.empty()) {
    items.clear();
    for (const auto& ob : s.obstacles) {
      json j{{"center", vec_json(ob.center)}, {"radius", ob.radius}};
      if (ob.velocity.squared_norm() > 0.0) j["velocity"] = vec_json(ob.velocity);
      if (!ob.schedule.empty()) {
        j["schedule"] = json::array();
        for (const auto& seg : ob.schedule) {
          j["schedule"].push_back({{"t", seg.t}, {"velocity", vec_json(seg.velocity)}});
        }
      }
      items.push_back(j);
    }
    add_list("obstacles", items);
  }
  std::string out = "{\n";
  for (std::size_t i = 0; i < fields.size(); ++i) {
    out += "  " + json(fields[i].first).dump() + ": " + fields[i].second;
    out += i + 1 < fields.size() ? ",\n" : "\n";
  }
  return out + "}\n";
}

std::string format_real(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trajectory_jsonl(std::ostream& out,
                            const std::vector<StepRecord>& trajectory) {
  std::string line;
  for (const auto& rec : trajectory) {
    line.clear();
    line += "{\"t\":" + format_real(rec.t) + ",\"positions\":[";
    for (std::size_t i = 0; i < rec.positions.size(); ++i) {
      if (i) line += ',';
      append_vec(line, rec.positions[i]);
    }
    line += "],\"velocities\":[";
    for (std::size_t i = 0; i < rec.velocities.size(); ++i) {
      if (i) line += ',';
      append_vec(line, rec.velocities[i]);
    }
    line += "],\"min_separation\":" + format_real(rec.min_separation);
    line += ",\"max_goal_distance\":" + format_real(rec.max_goal_distance);
    line += ",\"hamiltonian\":" + format_real(rec.hamiltonian);
    line += ",\"cap_active\":[";
    for (std::size_t i = 0; i < rec.cap_active.size(); ++i) {
      if (i) line += ',';
      line += rec.cap_active[i] ? "true" : "false";
    }
    line += "]}\n";
    out << line;
  }
}

void write_trajectory_csv(std::ostream& out, int dim,
                          const std::vector<StepRecord>& trajectory) {
  out << (dim == 3 ? "t,id,px,py,pz,vx,vy,vz\n" : "t,id,px,py,vx,vy\n");
  std::string row;
  for (const auto& rec : trajectory) {
    const std::string t = format_real(rec.t);
    for (std::size_t i = 0; i < rec.positions.size(); ++i) {
      row = t + "," + std::to_string(i);
      for (int k = 0; k < dim; ++k) row += "," + format_real(rec.positions[i][k]);
      for (int k = 0; k < dim; ++k) row += "," + format_real(rec.velocities[i][k]);
      row += '\n';
      out << row;
    }
  }
}

std::string metrics_to_json(const RunMetrics& m, const ControlParams& p,
                            const Scenario& scenario,
                            std::optional<std::uint64_t> seed,
                            std::size_t log_stride, int indent) {
  json j;
  j["scenario"] = scenario.name;
  j["n"] = scenario.size();
  j["seed"] = seed ? json(*seed) : json(nullptr);
  j["log_stride"] = log_stride;
  j["converged"] = m.converged;
  j["faulted"] = m.faulted;
  j["deadlock"] = m.deadlock;
  j["livelock"] = m.livelock;
  j["steps"] = m.steps;
  j["transition_time"] = real_json(m.transition_time);
  j["execution_time"] = real_json(m.execution_time);
  j["min_separation"] = real_json(m.min_separation);
  j["min_obstacle_clearance"] = real_json(m.min_obstacle_clearance);
  j["lbt_opt"] = real_json(m.lbt_opt);
  j["max_hamiltonian_increase"] = real_json(m.max_hamiltonian_increase);
  j["energy_violations"] = m.energy_violations;
  j["max_limit_excess"] = real_json(m.max_limit_excess);
  j["params"] = {
      {"dim", p.dim},          {"d_star", p.d_star},
      {"d", p.d},              {"r", p.r},
      {"xi", p.xi},            {"rho", p.rho},
      {"c1", p.c1},            {"c2", p.c2},
      {"v_max", limit_json(p.v_limit)},
      {"dt", p.dt},            {"end_max_dis", p.end_max_dis},
      {"max_sim_time", p.max_sim_time},
      {"rho_hat", p.rho_hat},  {"r_hat", p.r_hat},
      {"d_hat_star", p.d_hat_star},
  };
  return j.dump(indent) + "\n";
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw ConfigError("write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fmp
