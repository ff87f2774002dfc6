#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace syshock::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kData = 3, kNumerical = 4 };

/// Runs the command line `args` (without the program name), writing the
/// human-readable report to `out` and diagnostics to `err`. Returns the exit
/// code instead of exiting so tests can drive it in-process.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace syshock::cli
