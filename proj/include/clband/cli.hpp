#pragma once

#include <string>
#include <vector>

namespace clband {

// Exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitInput = 4,
  kExitInfeasible = 5,
};

// Runs one subcommand: gsnr-profile, optimize-power, mrd-table, simulate or
// report. Diagnostics go to stderr.
int dispatch(const std::vector<std::string>& args);
int dispatch(int argc, char** argv);

}  // namespace clband
