#pragma once

#include <iosfwd>

namespace secrit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAnalysisError = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `secrit` executable. `in` feeds `serve`.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace secrit
