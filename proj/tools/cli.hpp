#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pencilkit::cli {

/// Runs one invocation; args excludes the program name. Returns the exit
/// code: 0 success, 2 input error, 3 internal inconsistency.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pencilkit::cli
