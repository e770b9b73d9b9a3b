#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ciindex::cli {

/// Parses argv-style arguments (without the program name) and runs the
/// requested command. Returns the process exit code: 0 success, 2 validation
/// failure, 3 runtime failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ciindex::cli
