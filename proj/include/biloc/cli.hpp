// Command-line front door. run_cli is the whole program behind a thin
// main(), so tests can drive every subcommand in-process.
//
// Exit codes: 0 success (and bound violated where one is tested),
// 2 usage or I/O failure, 3 tested bound not violated or a causality
// condition unsatisfied.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace biloc {

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace biloc
