#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gasrec::cli {

enum ExitCode { kSuccess = 0, kRuntimeError = 1, kConfigError = 2 };

/// Runs the command line `args` (without the program name). Results go to
/// `out` or to the output file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gasrec::cli
