#pragma once

// Command-line front end:
//   mecrl train --config PATH [--runs K] [--out DIR] [--jobs J]
//   mecrl eval  --config PATH --checkpoints DIR [--episodes K]
//   mecrl plot  --in CSV... --out SVG
//   mecrl grid  --config PATH --gamma LIST --noise LIST [--out DIR] [--algos LIST]
// Exit codes: 0 success, 1 usage or validation error, 2 I/O error.

#include <ostream>
#include <string>
#include <vector>

namespace mecrl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitIo = 2;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Directory name for one grid cell, e.g. "g0.95_n200".
std::string grid_cell_name(double gamma, double noise);

// Parses "0.95,0.99" into numbers; throws ValidationError.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace mecrl::cli
