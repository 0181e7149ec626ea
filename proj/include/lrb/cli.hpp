#pragma once

#include <string>
#include <vector>

namespace lrb {

// Argv-style entry point (program name excluded). Returns the exit code:
// 0 success, 1 usage or config problem, 2 failure while running.
int cli_execute(const std::vector<std::string>& args);

} // namespace lrb
