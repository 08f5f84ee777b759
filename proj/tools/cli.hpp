#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hetpart::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kInputNotFound = 2;
inline constexpr int kInvalidInput = 3;

struct AlphaSweep {
  double start = 0.0;
  double stop = 1.0;
  double step = 0.1;
};

// Parses "start:stop:step". Throws hetpart::Error(argument).
AlphaSweep parse_alpha_sweep(const std::string& text);
// start, start + step, ... up to stop (inclusive within rounding).
std::vector<double> sweep_values(const AlphaSweep& sweep);

// Runs one subcommand; args exclude the program name. Failures print a
// one-line JSON object {"error": ..., "message": ...} on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hetpart::cli
