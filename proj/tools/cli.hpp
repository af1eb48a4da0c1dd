#pragma once

#include <ostream>

namespace upf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

/// Entry point of the `upfsim` tool. Subcommands: run, sweep, oracle-check,
/// scenario.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace upf::cli
