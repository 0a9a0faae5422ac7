#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace camsearch {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Runs one command line (args excludes the program name). Data goes to
// `out` or to files, diagnostics and the resolved configuration to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace camsearch
