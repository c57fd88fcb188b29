#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qtm::cli {

/// Exit codes of the `qtm` tool.
enum ExitCode : int {
  kOk = 0,          ///< success, or the verified strategy is optimal
  kSuboptimal = 1,  ///< verification ran and a condition failed
  kUsage = 2,       ///< malformed command line or out-of-range parameter
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qtm::cli
