#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fmp/core.hpp"
#include "fmp/metrics.hpp"
#include "fmp/simulator.hpp"

namespace fmp {

/// A scenario file: geometry plus whatever tunables it pins.
struct ScenarioFile {
  Scenario scenario;
  ParamOverrides overrides;
  std::optional<std::uint64_t> seed;
};

/// Parses the scenario JSON schema. Throws ConfigError with the source name
/// and either line:column (syntax) or the offending field path.
ScenarioFile parse_scenario(std::string_view text,
                            const std::string& source = "<input>");
ScenarioFile load_scenario(const std::filesystem::path& path);

/// Inverse of parse_scenario; only set overrides are written.
std::string scenario_to_json(const ScenarioFile& file);

/// Shortest text that reads back to exactly x (17 significant digits);
/// non-finite values become null.
std::string format_real(double x);

/// One JSON object per record, one record per line.
void write_trajectory_jsonl(std::ostream& out,
                            const std::vector<StepRecord>& trajectory);
/// Columns t,id,px,py[,pz],vx,vy[,vz]; one row per agent per record.
void write_trajectory_csv(std::ostream& out, int dim,
                          const std::vector<StepRecord>& trajectory);

/// Metrics, the resolved parameter set, scenario name, seed and log stride
/// as a JSON document with a trailing newline. indent < 0 gives one line.
std::string metrics_to_json(const RunMetrics& metrics, const ControlParams& params,
                            const Scenario& scenario,
                            std::optional<std::uint64_t> seed,
                            std::size_t log_stride = 1, int indent = 2);

/// Writes `text` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view text);
std::string read_file(const std::filesystem::path& path);

}  // namespace fmp
