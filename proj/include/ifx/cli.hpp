#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ifx {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2 };

/// Runs one `ifx` invocation. `args` excludes the program name. All
/// diagnostics go to `err`; human-readable tables go to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ifx
