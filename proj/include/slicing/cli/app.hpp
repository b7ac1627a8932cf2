#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace slicing::cli {

/// Exit codes of the command-line driver.
enum ExitCode : int { kPass = 0, kCheckFailure = 1, kUsageError = 2, kInfeasible = 3 };

/// Entry point of the `slicing_lab` tool; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace slicing::cli
