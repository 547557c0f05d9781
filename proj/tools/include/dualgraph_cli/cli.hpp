#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dualgraph::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Runs one `dualgraph <subcommand> ...` invocation; args excludes the
// program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dualgraph::cli
