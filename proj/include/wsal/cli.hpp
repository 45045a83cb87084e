#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wsal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitTrialFailure = 1;
inline constexpr int kExitUsage = 2;

/// The whole command line front end. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wsal::cli
