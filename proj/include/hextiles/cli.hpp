#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hextiles {

/// Entry point of the `hextiles` tool. `args` excludes the program name.
/// Returns 0 on success, 1 on user error, 2 on internal error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hextiles
