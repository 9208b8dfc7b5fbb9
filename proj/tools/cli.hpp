#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace simpson::cli {

// Exit codes: 0 success, 1 domain/input error or failed verification,
// 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace simpson::cli
