#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nkt::cli {

enum Exit : int { kPass = 0, kFailed = 1, kUsage = 2 };

/// Runs one command. `args` excludes the program name. Reports go to `out`,
/// diagnostics and usage to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nkt::cli
