#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace probesched::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNotConverged = 3;
inline constexpr int kExitNumerical = 4;

// args excludes the program name. Summary lines go to `out`, diagnostics to
// `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace probesched::cli
