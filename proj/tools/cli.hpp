#pragma once

#include <iosfwd>

namespace dalc::cli {

// Exit codes of the dalc tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one dalc command. argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dalc::cli
