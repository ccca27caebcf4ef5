#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tropdeg {

/// Exit codes: 0 success, 1 validation error, 2 numerical failure.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2 };

/// Runs the command line `args` (without the program name). Reports go to
/// `out`; errors go to `err` as a JSON object {"error", "message", ...}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tropdeg
