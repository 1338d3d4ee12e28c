#pragma once

#include <ostream>

namespace tsdyn::io {

/// Exit codes: 0 success, 1 a check failed, 2 bad input or library error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tsdyn::io
