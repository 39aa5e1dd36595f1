#pragma once

#include <iosfwd>

namespace fmp {

/// Exit codes of the command-line tool.
inline constexpr int kExitConverged = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

/// Entry point of the `fmp` tool (run, bench, gen, replay-check).
int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

}  // namespace fmp
