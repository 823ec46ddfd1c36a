#pragma once

#include <ostream>

namespace dispcert {

// Exit codes: 0 success, 2 validation error, 3 divergence, 1 anything else.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dispcert
