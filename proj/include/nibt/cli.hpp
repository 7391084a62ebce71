#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nibt {

// Exit codes: 0 success, 2 validation error, 3 numerical infeasibility.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace nibt
