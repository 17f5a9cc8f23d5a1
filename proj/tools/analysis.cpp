#include "analysis.hpp"

#include <cmath>

namespace gapeq::cli {

TcResult locate_tc(const GapOperator& op, const JumpSettings& s) {
    return op.critical_temperature(s.tc_tol * op.lower().tau(), s.solver);
}

JumpAnalysis analyze_jump(const GapOperator& op, const DensityOfStates& dos, const JumpSettings& s) {
    TcResult located = locate_tc(op, s);
    const double tc = located.tc;
    JumpAnalysis a{std::move(located), estimate_limits(op, tc, s.solver, {}, s.threads), {}, {}, {}, {}};
    a.F = F_of_x(op.kernel(), op.grid(), a.limits.v, tc);
    if (a.limits.positive()) a.G = G_of_x(op.kernel(), op.grid(), a.limits.v, a.limits.w, tc);

    const ThermoModel model(op, dos, tc, s.solver);
    a.curve = entropy_and_cv([&](double T) { return model.omega(T); }, {}, tc, s.step_fraction * tc,
                             s.richardson, s.threads);

    std::optional<double> simplified;
    if (op.kernel().is_constant()) {
        const double slope = simplified_limit_slope(op.lower());
        simplified = delta_cv_constant_kernel(-slope, op.lower().tau(), op.params());
    }
    a.report = delta_cv(a.limits, op.params(), a.curve.cv_jump(), simplified);
    return a;
}

std::vector<double> thermo_temperatures(double lo, double hi, int count, double tc, double h) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
        if (std::abs(t - tc) < h) continue;
        out.push_back(t);
    }
    return out;
}

}  // namespace gapeq::cli
