#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace multinorm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitViolated = 2;

/// Runs one command line (args[0] is the program name). Returns 0 on
/// success, 2 when a check reports `violated` (or a selftest item fails), 1 on
/// usage, config or capacity errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace multinorm::cli
