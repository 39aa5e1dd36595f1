#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fmp/scenarios.hpp"
#include "fmp/simulator.hpp"

namespace fmp {

/// Adjacent spacing of the circle benchmarks as a multiple of d. Goals closer
/// than r are not rest points of the control law (their neighbors keep
/// pushing), so the factor must clear r / d with room to spare.
inline constexpr double kCircleSpacingFactor = 1.5;
/// Spacing factor of the sparse circle instance.
inline constexpr double kSparseCircleSpacingFactor = 3.0;

/// One run of a benchmark suite.
struct BenchCase {
  std::string suite;
  std::string label;
  Scenario scenario;
  ParamOverrides overrides;
  std::optional<std::uint64_t> seed;
  /// Suite-specific key columns of the summary table (e.g. spacing, n).
  std::vector<std::pair<std::string, std::string>> keys;
  /// Instance is sparse enough that transition time should stay within a
  /// small multiple of the straight-line bound.
  bool sparse = false;
};

struct SuiteOptions {
  /// Agent counts for circle and scale; empty means the suite default.
  std::vector<std::size_t> n;
  /// Spacings for swap and formation; empty means the suite default.
  std::vector<double> spacing;
  std::optional<SwapKind> kind;
  /// Seeded instances for random and scale3d.
  std::size_t cases = 20;
  std::uint64_t seed = 0;
};

/// circle, swap, obstacle, random, formation, scale3d, scale.
const std::vector<std::string>& suite_names();

/// Builds the runs of a named suite. Throws ConfigError for an unknown name.
std::vector<BenchCase> make_suite(const std::string& name,
                                  const SuiteOptions& options = {});

/// Table 3 arena: n = 30 in a 40 x 40 m box.
RandomCaseSpec table3_spec(std::uint64_t seed);
/// 3D arena: n = 100 in a 60 x 60 x 30 m box.
RandomCaseSpec random3d_spec(std::uint64_t seed);

}  // namespace fmp
