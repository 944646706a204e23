#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace costeval::cli {

// sysexits-style codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;
inline constexpr int kExitNoInput = 66;
inline constexpr int kExitUnavailable = 69;
inline constexpr int kExitConfig = 78;

// lint verdicts
inline constexpr int kLintPass = 0;
inline constexpr int kLintWarn = 1;
inline constexpr int kLintFail = 2;

/// Runs one command line (args exclude the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace costeval::cli
