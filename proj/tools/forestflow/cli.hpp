#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace forestflow::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;  // I/O or validation failure
inline constexpr int kUsage = 2;    // unknown subcommand or invalid flag value

// Runs one command line (args[0] is the program name). Summary lines go to
// `out` prefixed "forestflow: ", diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace forestflow::cli
