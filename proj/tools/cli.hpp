#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ddag::cli {

enum ExitCode : int { kOk = 0, kDomainError = 1, kUsageError = 2 };

// Parses `args` (without the program name) and runs one subcommand. Results
// go to `out`, diagnostics and help for usage errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ddag::cli
