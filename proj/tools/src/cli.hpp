#ifndef DEEPCLIFE_TOOLS_CLI_HPP_
#define DEEPCLIFE_TOOLS_CLI_HPP_

#include <iosfwd>

namespace deepclife::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point of the `deepclife` tool. Reports go to `out`, diagnostics to
/// `err`; the return value is the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace deepclife::cli

#endif  // DEEPCLIFE_TOOLS_CLI_HPP_
