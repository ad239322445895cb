#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace apisift::cli {

/// Runs one command line (without the program name). Errors are reported
/// as a single JSON line on `err`; the return value is the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace apisift::cli
