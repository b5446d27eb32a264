#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace resetfpt {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitDomain = 2,
  kExitSolver = 3,
  kExitStrictCensoring = 4,
};

/// Runs one command line (without the program name). Results go to `out`
/// unless --out names a file; errors go to `err` as a JSON object.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace resetfpt
