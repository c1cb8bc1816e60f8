#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace covsmooth::cli {

/// Exit codes of the command line tool.
enum ExitCode : int
{
  kSuccess = 0,
  kRuntimeError = 1,
  kUsageError = 2
};

/// Runs one invocation; `args` excludes the program name. Normal output goes
/// to `out`, diagnostics and help on usage errors to `err`.
int run(const std::vector<std::string>& args,
        std::ostream& out,
        std::ostream& err);

/// Parses a bandwidth grid given as "A:B:STEP", a comma list, or one value.
std::vector<double> parse_h_grid(const std::string& text);

} // namespace covsmooth::cli
