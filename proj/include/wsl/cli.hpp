#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wsl {

/// Command-line entry point; `args` excludes the program name. Returns 0 when
/// everything passes, 1 when a check fails and 2 on usage or config errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wsl
