#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pmanifold::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitAlgorithm = 4;

/// Runs one subcommand. `args` excludes the program name. Diagnostics go to
/// `err` as a single line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pmanifold::cli
