#pragma once

// Pipelines shared by the `jump`/`thermo` subcommands and the acceptance suite.

#include <optional>
#include <vector>

#include "gapeq/critical.hpp"
#include "gapeq/gap_solver.hpp"
#include "gapeq/thermo.hpp"

namespace gapeq::cli {

struct JumpAnalysis {
    TcResult tc;
    CriticalLimits limits;
    std::vector<double> F, G;
    ThermoCurve curve;   ///< one-sided limits at T_c only
    JumpReport report;
};

struct JumpSettings {
    SolverOptions solver;
    double tc_tol = 1e-14;         ///< relative to tau_1
    double step_fraction = 1e-4;   ///< h / T_c
    bool richardson = true;
    int threads = 1;
};

TcResult locate_tc(const GapOperator& op, const JumpSettings& s);

/// T_c, v and w, F and G, the stencil jump, and the formula jump; for constant kernels also
/// the simplified-equation jump.
JumpAnalysis analyze_jump(const GapOperator& op, const DensityOfStates& dos, const JumpSettings& s);

/// `count` temperatures spread over [lo, hi], with any point inside (tc - h, tc + h) removed.
std::vector<double> thermo_temperatures(double lo, double hi, int count, double tc, double h);

}  // namespace gapeq::cli
