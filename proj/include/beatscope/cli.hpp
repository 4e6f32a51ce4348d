#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace beatscope {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2 };

/// Parses `args` (args[0] is the program name) and runs exactly one subcommand.
/// Diagnostics go to `err`; data only to files.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace beatscope
