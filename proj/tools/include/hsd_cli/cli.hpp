#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hsd::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hsd::cli
