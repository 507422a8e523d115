#pragma once

#include <iosfwd>

namespace qumode {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of qumode-bench: subcommands run, sweep, wigner, report.
/// Returns 0 on success, 1 on a runtime failure, 2 on a usage error.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace qumode
