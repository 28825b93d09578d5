#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace iic::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // an asserted property failed
inline constexpr int kExitUsage = 2;    // bad flags or a capacity limit

/// Runs one command line (without the program name) and returns the exit
/// code. Results go to files under --out-dir; the human-readable summary goes
/// to `out`, diagnostics and timings to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace iic::cli
