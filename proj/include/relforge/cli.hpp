#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace relforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

// Runs one subcommand. `args` excludes the program name. Reports go to `out`;
// errors are written to `err` as one JSON object per line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace relforge::cli
