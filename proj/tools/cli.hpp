#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace skinbench::cli {

/// Exit codes: 0 success, 1 failure (including any per-image failure),
/// 2 usage or validation error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace skinbench::cli
