#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aos::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;

/// Entry point of the `aos` binary. Subcommands: simulate, integrate,
/// stereo, perception, sweep, planesweep, serve. Errors go to `err` as lines
/// prefixed "error:".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "0.5,1,2" or an inclusive range "start:stop:step".
std::vector<double> parse_grid(const std::string& text);

}  // namespace aos::cli
