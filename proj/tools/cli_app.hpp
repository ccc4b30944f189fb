#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace primscope::cli {

/// Runs the full command-line tool in-process. `args` excludes the program
/// name. Returns the process exit code: 0 success, 1 usage error, 2 data
/// error. All output goes to the given streams unless --out redirects it.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace primscope::cli
