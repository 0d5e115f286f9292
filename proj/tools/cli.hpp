#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace a1bellman::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes.
inline constexpr int kPass = 0;
inline constexpr int kFail = 1;
inline constexpr int kUsage = 2;

/// Runs one invocation; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace a1bellman::cli
