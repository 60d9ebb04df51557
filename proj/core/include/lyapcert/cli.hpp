#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lyapcert::cli {

/// Exit-code contract shared with scripts and CI:
///   0  analysis certified asymptotic or global asymptotic stability
///   1  internal error
///   2  invalid input (file, schema, flag values)
///   3  analysis was inconclusive (or certified plain stability only)
inline constexpr int k_exit_certified = 0;
inline constexpr int k_exit_internal_error = 1;
inline constexpr int k_exit_input_error = 2;
inline constexpr int k_exit_inconclusive = 3;

/// Runs `lyapcert <subcommand> ...` against the given streams and returns
/// the process exit code. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace lyapcert::cli
