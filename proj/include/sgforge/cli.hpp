#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sgforge::cli {

/// Runs the `sgforge` command line. `args` excludes the program name.
/// Returns the process exit code (0 ok, 1 warnings, 2 errors, 3 usage).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sgforge::cli
