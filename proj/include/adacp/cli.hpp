#pragma once

#include <string>
#include <vector>

namespace adacp {

// Full command-line entry point; returns the process exit code.
// 0 = success, 2 = validation error, 3 = runtime error, 4 = oracle failure.
int cli_main(const std::vector<std::string>& args);

}  // namespace adacp
