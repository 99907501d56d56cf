#pragma once

// Command-line front end: argument parsing and subcommand dispatch.

#include <iosfwd>
#include <string>
#include <vector>

#include "parabolica/types.hpp"

namespace parabolica::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNumerical = 2;

/// Accepts "a+bi", "a-bi", "bi", "a" and "a,b". Throws PreconditionError.
Complex parse_complex(const std::string& text);

/// "p/q" or an integer. Throws PreconditionError.
Angle parse_angle(const std::string& text);

/// Comma list ("0.1,0.01") or a decade range ("1e-1..1e-4", both ends included).
std::vector<double> parse_alphas(const std::string& text);

/// Runs the tool. Results go to `out` unless --output names a file;
/// diagnostics go to `err`. Returns 0, 1 (input error) or 2 (numerical failure).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace parabolica::cli
