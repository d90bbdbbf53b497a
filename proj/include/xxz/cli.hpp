#pragma once

// Command-line front end: coeffs, simulate, compare, sweep, experiment.
//
// Exit status: 0 success, 1 invalid input (including usage and I/O errors),
// 2 numeric blowup, 3 a failed experiment assertion.

#include <iosfwd>
#include <string>
#include <vector>

namespace xxz {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitBlowup = 2;
inline constexpr int kExitAssertion = 3;

// `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_main(int argc, const char* const* argv);

} // namespace xxz
