#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sigsynth::cli {

enum ExitCode : int {
    kSuccess = 0,
    kClean = 1,
    kInputError = 2,
    kEmptySignature = 3,
    kInternalError = 4,
};

/// Parses and runs one subcommand. `args` excludes the program name. Machine-readable
/// results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sigsynth::cli
