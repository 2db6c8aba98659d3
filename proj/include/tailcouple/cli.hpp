#pragma once

#include <iosfwd>

namespace tailcouple {

// Exit codes: 0 success, 2 validation error, 3 tail divergence.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitDivergence = 3;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tailcouple
