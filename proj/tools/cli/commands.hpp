#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lvar::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitAlgorithm = 3;

/// Parses `args` (without the program name) and runs the selected
/// subcommand. Output files are written directly; anything requested on
/// stdout goes to `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lvar::cli
