#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ebae::cli {

/// Runs the command line in-process. `args` excludes the program name.
/// Returns 0 on success, 1 on evaluation failure, 2 on load, schema or usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ebae::cli
