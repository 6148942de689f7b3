#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lammos::cli {

/// Exit codes: 0 success, 1 model-level failure, 2 usage/parse error.
enum ExitCode : int { kSuccess = 0, kModelFailure = 1, kUsageError = 2 };

/// Entry point of the `lammos` tool; args exclude the program name.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lammos::cli
