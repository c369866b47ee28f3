#pragma once

#include <string>
#include <vector>

namespace cliquewatch::cli {

// Runs one command line (args[0] is the program name) and returns the
// process exit code: 0 success, 1 data/runtime error, 2 usage/config error.
int run(const std::vector<std::string>& args);

}  // namespace cliquewatch::cli
