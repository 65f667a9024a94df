#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bchain::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Runs `bchain <subcommand> [flags]`. args[0] is the program name.
/// Messages go to `out` and `err`; the return value is the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bchain::cli
