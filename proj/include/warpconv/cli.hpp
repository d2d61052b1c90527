#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace warpconv {

/// Runs one subcommand (distance, ret, converge, audit, torus3, plot); args excludes the program name.
/// Exit codes: 0 success, 1 failed audit, 2 invalid input or schema error, 3 numerical guard.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace warpconv
