#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crackdual::cli {

enum Exit { ok = 0, config_error = 2, numeric_failure = 3 };

// Runs the command line `args` (without the program name); output goes to out and err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crackdual::cli
