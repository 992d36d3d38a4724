#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace rh {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitFakeDetected = 2,
  kExitEmptyDatabase = 3,
};

/// Entry point of the `rh` tool. args excludes the program name. Normal
/// output goes to `out`, diagnostics to `err`.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace rh
