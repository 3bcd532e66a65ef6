#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace extdesign {

/// Exit codes of the command line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumeric = 2;

/// Runs the command line with args (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace extdesign
