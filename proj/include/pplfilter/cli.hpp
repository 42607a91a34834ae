#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pplfilter::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;

// Runs the command line `args` (without the program name). Machine-readable
// output goes to files or `out`; summaries and errors go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Hours to process `bytes` at `mb_per_s` (10^6 bytes per second), rounded to
// one decimal.
double estimate_hours(double bytes, double mb_per_s);

}  // namespace pplfilter::cli
