#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vortex {

// Exit codes: 0 success, 1 bad input or internal error, 2 proof not obtained (NotValidated, stalled branch).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const char* build_id();

}  // namespace vortex
