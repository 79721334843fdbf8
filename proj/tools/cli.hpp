#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ordstat::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2 };

// Runs one command line (without the program name). Reports go to `out`
// (or to --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ordstat::cli
