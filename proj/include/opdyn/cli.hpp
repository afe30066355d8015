#pragma once

#include <string>
#include <vector>

namespace opdyn {

// Command-line front end. Subcommands: simulate, exact, hybrid, bench.
// Returns the process exit status: 0 on success, 2 on usage errors,
// 1 on runtime failures (a report stub is still written when possible).
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

}  // namespace opdyn
