#pragma once

// The invariant suite behind `gapeq verify` and the acceptance test binary.

#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace gapeq::cli {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceReport {
    std::vector<CriterionResult> results;
    bool all_pass() const;
};

/// Runs criteria 1-11 on the built-in reference kernels plus the kernel from `cfg`.
/// Each result is also streamed to `progress` as soon as it is known.
AcceptanceReport run_acceptance(const RunConfig& cfg, std::ostream* progress = nullptr);

/// "PASS  3  constant-kernel collapse  (0.12 s)  detail..."
std::string format_line(const CriterionResult& r);

}  // namespace gapeq::cli
