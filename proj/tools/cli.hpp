#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qdesign::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kOptimizationFailed = 2;
inline constexpr int kInadmissibleModel = 3;

// Runs the command line `args` (without the program name). Normal output goes
// to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qdesign::cli
