#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gaugeclust::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

/// Runs one command line (args excludes the program name). Text that would go
/// to stdout is written to out, diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gaugeclust::cli
