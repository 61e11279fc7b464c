#pragma once

#include <iosfwd>

namespace alloy::cli {

enum ExitCode : int {
  kPass = 0,
  kVerdictFailed = 1,
  kUsageError = 2,
  kRuntimeError = 3,
};

/// Entry point of the alloy-lab command line. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace alloy::cli
