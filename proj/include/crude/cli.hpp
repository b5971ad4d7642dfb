#pragma once

#include <string>
#include <vector>

namespace crude::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInternal = 4;

// Entry point behind main(). The vector overload exists for in-process
// tests; args exclude the program name.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace crude::cli
