#pragma once

#include <iosfwd>

namespace sqr::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kNonConvergence = 3 };

/// Parses argv, runs the requested subcommand and writes its artifacts.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sqr::cli
