#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sigwin {

enum ExitStatus : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitInput = 2,
  kExitConfigMismatch = 3,
};

/// Runs the `sigwin` command line. `args` includes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sigwin
