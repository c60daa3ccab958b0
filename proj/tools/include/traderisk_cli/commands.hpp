#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace traderisk::cli {

enum ExitCode : int {
  kSuccess = 0,
  kDegenerate = 1,  // a computation did not converge
  kInputError = 2,
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace traderisk::cli
