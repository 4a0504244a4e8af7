#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace casimir::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kConvergence = 3,
  kDegenerate = 4,
};

// Runs one casimir_lab command. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace casimir::cli
