#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mrrope::cli {

/// Runs the mrrope command line on `args` (without the program name),
/// writing results to `out` and messages to `err`. Returns the process exit
/// code: 0 on success, 1 on domain errors, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mrrope::cli
