#pragma once

#include <iosfwd>

namespace hyt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point of the `hyt` tool. Subcommands: load-check, train, eval,
/// bench, ablate, describe.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hyt::cli
