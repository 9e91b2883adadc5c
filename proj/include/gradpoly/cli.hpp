#pragma once

#include <string>
#include <vector>

namespace gradpoly::cli {

// Exit codes: 0 success, 2 validation failure, 3 numeric budget exhaustion,
// 4 usage error.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace gradpoly::cli
