#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sica::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

/// Runs the `sica` command line with `args` (program name excluded) and
/// returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sica::cli
