#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ragdepth::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitEndpoint = 3;

// Entry point shared by the executable and the tests. Data goes to `out`,
// diagnostics to stderr.
int run(int argc, const char* const* argv, std::ostream& out);

// argv without the program name.
int run(const std::vector<std::string>& args, std::ostream& out);

}  // namespace ragdepth::cli
