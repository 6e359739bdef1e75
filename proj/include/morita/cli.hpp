#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace morita {

/// Runs one command line (without the program name). Verdicts go to `out`,
/// diagnostics to `err`. Returns 0 on success, 1 when a verdict fails and 2
/// on usage or input errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace morita
