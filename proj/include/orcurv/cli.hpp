#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace orc {

/// Entry point of the orcurv tool. `args` excludes the program name.
/// Returns 0 on success, 1 on usage error, 2 on runtime failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace orc
