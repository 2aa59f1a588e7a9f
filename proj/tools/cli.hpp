#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace depthprop::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2 };

/// Runs the tool on `args` (args[0] is the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace depthprop::cli
