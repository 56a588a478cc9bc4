#pragma once

#include <string>
#include <vector>

namespace morreylab {

/// Runs one CLI invocation (args exclude the program name). Usage errors
/// return 2; numeric-domain errors print the error name and return 1.
int run_cli(const std::vector<std::string>& args);

}  // namespace morreylab
