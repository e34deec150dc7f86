#pragma once

#include <iosfwd>

namespace seqopt::cli {

enum ExitCode : int {
    ok = 0,
    internal_error = 1,
    validation_error = 2,
    numerical_guard = 3,
    non_convergence = 4
};

/// Entry point of the seqopt command line. Writes artifacts under --out and
/// short status lines to out/err; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace seqopt::cli
