#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace csm::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kIo = 2,
  kProtocol = 3,
  kStrictWarnings = 4,
};

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace csm::cli
