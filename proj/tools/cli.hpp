#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hgc::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2, kIo = 3 };

/// Entry point shared by the `hgc` binary and the CLI tests. `args` excludes
/// the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hgc::cli
