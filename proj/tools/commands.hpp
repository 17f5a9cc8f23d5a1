#pragma once

#include <iosfwd>
#include <string>

#include "config.hpp"

namespace gapeq::cli {

enum ExitCode : int {
    kSuccess = 0,
    kFailure = 1,
    kConfigError = 2,
    kNonConvergence = 3,
    kInvariantViolation = 4,
};

/// Runs one of simplified, tc, solve, sweep, thermo, jump, verify. Artifacts go to
/// cfg.out_dir/<name>.csv and/or <name>.json; a short summary goes to `out`.
/// Exceptions propagate; see exit_code_for().
int run_subcommand(const std::string& name, const RunConfig& cfg, std::ostream& out);

/// Maps the library's exception types onto exit codes and prints the message to `err`.
int exit_code_for(std::exception_ptr error, std::ostream& err);

}  // namespace gapeq::cli
