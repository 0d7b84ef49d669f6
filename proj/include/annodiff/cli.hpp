#pragma once

#include <iosfwd>

namespace annodiff::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitInternal = 2;

/// Entry point of the `annodiff` tool. Subcommands: ingest, score,
/// simulate, report.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace annodiff::cli
