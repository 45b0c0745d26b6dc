#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qsurf::cli {

/// Runs the qsurf command line with argv-style arguments (args[0] is the
/// program name). Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qsurf::cli
