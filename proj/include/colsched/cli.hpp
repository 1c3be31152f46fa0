#pragma once

// Command-line front end. Subcommands:
//   bounds   --grid a:b:step|v1,v2,..  --out PATH [--y-cap N] [--jobs N]
//   simulate --config F --policy P [--horizon T] [--seed S] --out PATH [--sample-every K]
//   region   --config F --axis all|1,2,.. --step s --out PATH [--mode symmetric|grid] [--max-rate r]
//   assign   --problem F --mode exact|greedy --out PATH [--enumeration-cap N] [--override-cap]
// Every output file starts with one '#' line naming the command, its
// canonical arguments, the hash of the resolved input and the seed.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace colsched {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int io = 1;
inline constexpr int invalid = 2;
inline constexpr int size_guard = 3;
}  // namespace exit_code

/// Parses "a:b:step" (inclusive, empty when a > b), a comma list of values
/// or fractions like "1/3", or "" (empty grid). Throws std::invalid_argument.
std::vector<double> parse_grid(std::string_view spec);

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace colsched
