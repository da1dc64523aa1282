#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pickands::cli {

/// Exit codes: 0 success, 1 contract or inequality failure, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line. `args` excludes the program name. Results go to
/// `out` (or to --output), diagnostics and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// key=value lines; '#' starts a comment. Keys are long flag names without dashes.
std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text);

}  // namespace pickands::cli
