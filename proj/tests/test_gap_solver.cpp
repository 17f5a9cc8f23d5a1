#include <gtest/gtest.h>

#include <cmath>

#include "gapeq/errors.hpp"
#include "gapeq/gap_solver.hpp"
#include "gapeq/simplified_gap.hpp"

using namespace gapeq;

namespace {

const PhysicalParams kParams{};

Kernel separable() { return Kernel(SeparableCoupling{0.4, {0.1}}, 0.4, 0.5, kParams); }

double sup_diff(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST(GapOperator, ApplyBMatchesDirectSum) {
    const GapOperator op(separable(), kParams, 32);
    const auto x = op.grid().nodes();
    const auto w = op.grid().weights();
    std::vector<double> u(op.size());
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = 0.1 + 0.05 * std::sin(3.0 * x[j]);
    const double T = 0.05;
    const auto bu = op.apply_b(T, u);
    for (std::size_t i = 0; i < u.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) {
            const double e = std::hypot(x[j], u[j]);
            s += (0.4 + 0.1 * x[i] * x[j]) * w[j] * u[j] * std::tanh(e / (2.0 * T)) / e;
        }
        EXPECT_NEAR(bu[i], s, 1e-15);
    }
    u[3] = -1.0;
    EXPECT_THROW(op.apply_b(T, u), DomainError);
}

TEST(GapOperator, ConstantKernelCollapsesToScalarGap) {
    const GapOperator op(Kernel::constant(0.3, kParams), kParams);
    const double tau = transition_temperature(0.3, kParams);
    for (double frac : {0.0, 0.3, 0.8, 0.97}) {
        const double T = frac * tau;
        const auto sol = op.solve_fixed_point(T);
        const double ref = solve_simplified(0.3, T, kParams);
        for (double v : sol.values) EXPECT_NEAR(v, ref, 1e-12 * std::max(ref, 1e-3)) << frac;
    }
}

TEST(GapOperator, SolutionIsSandwichedBetweenScalarGaps) {
    const GapOperator op(separable(), kParams);
    for (double T : {0.0, 0.02, 0.05, 0.08, 0.095}) {
        const auto sol = op.solve_fixed_point(T);
        EXPECT_LT(op.sandwich_excess(sol), 1e-12) << T;
        EXPECT_LE(sol.residual, 1e-12);
    }
}

TEST(GapOperator, GridRefinementOracle) {
    const GapOperator coarse(separable(), kParams, 64), fine(separable(), kParams, 128);
    const double T = 0.05;
    const auto a = coarse.solve_fixed_point(T), b = fine.solve_fixed_point(T);
    for (double x : {0.01, 0.05, 0.2, 0.5, 0.9, 1.0})
        EXPECT_NEAR(coarse.nystrom_value(T, a.values, x), fine.nystrom_value(T, b.values, x), 1e-7) << x;
}

TEST(GapOperator, IterationMethodsAgree) {
    const GapOperator op(separable(), kParams);
    const double T = 0.06;
    SolverOptions newton;
    const auto ref = op.solve_fixed_point(T, newton);
    for (auto m : {IterationMethod::picard, IterationMethod::anderson}) {
        SolverOptions o;
        o.method = m;
        o.max_iter = 5000;
        const auto sol = op.solve_fixed_point(T, o);
        EXPECT_LT(sup_diff(sol.values, ref.values), 1e-10) << to_string(m);
        EXPECT_EQ(sol.phase, Phase::superconducting);
    }
    EXPECT_EQ(parse_iteration_method("anderson"), IterationMethod::anderson);
    EXPECT_THROW(parse_iteration_method("secant"), ConfigError);
}

TEST(GapOperator, NormalAboveUpperTau) {
    const GapOperator op(separable(), kParams);
    const auto sol = op.solve_fixed_point(op.upper().tau() * 1.01);
    EXPECT_EQ(sol.phase, Phase::normal);
    EXPECT_EQ(sol.sup(), 0.0);
}

TEST(GapOperator, NonConvergenceCarriesHistory) {
    const GapOperator op(separable(), kParams);
    SolverOptions o;
    o.method = IterationMethod::picard;
    o.max_iter = 2;
    o.tol = 1e-15;
    try {
        op.solve_fixed_point(0.05, o);
        FAIL() << "expected NonConvergenceError";
    } catch (const NonConvergenceError& e) {
        EXPECT_FALSE(e.residual_history().empty());
    }
}

TEST(GapOperator, FixedPointIsUnique) {
    const GapOperator op(separable(), kParams);
    for (double T : {0.01, 0.05, 0.09, 0.0948, 0.0955}) {
        const auto rep = op.uniqueness_probe(T);
        EXPECT_TRUE(rep.agree) << T << " gap " << rep.gap;
    }
}

TEST(GapOperator, TemperatureDerivativeMatchesFiniteDifference) {
    const GapOperator op(separable(), kParams);
    const double T = 0.06, h = 1e-5;
    const auto sol = op.solve_fixed_point(T);
    const auto du = op.temperature_derivative(sol);
    const auto up = op.solve_fixed_point(T + h), dn = op.solve_fixed_point(T - h);
    for (std::size_t i = 0; i < du.size(); i += 7) {
        const double fd = (up.values[i] - dn.values[i]) / (2.0 * h);
        EXPECT_NEAR(du[i], fd, 1e-6 * std::abs(fd) + 1e-8) << i;
    }
}

TEST(GapOperator, CriticalTemperatureSeparatesPhases) {
    const GapOperator op(separable(), kParams);
    const auto r = op.critical_temperature(1e-13);
    EXPECT_GE(r.tc, op.lower().tau() * (1.0 - 1e-6));
    EXPECT_LE(r.tc, op.upper().tau() * (1.0 + 1e-6));
    EXPECT_LE(r.hi - r.lo, 1e-13);
    EXPECT_EQ(op.solve_fixed_point(r.tc * (1.0 - 1e-4)).phase, Phase::superconducting);
    EXPECT_EQ(op.solve_fixed_point(r.tc * (1.0 + 1e-4)).phase, Phase::normal);
}

TEST(GapOperator, SweepZeroesSlicesAboveTc) {
    const GapOperator op(separable(), kParams);
    const double tc = op.critical_temperature(1e-13).tc;
    const std::vector<double> temps{0.2 * tc, 0.6 * tc, 0.99 * tc, tc, 1.1 * tc};
    const auto s = op.sweep_temperature(temps, {}, tc);
    EXPECT_GT(s.values[2][0], 0.0);
    for (std::size_t i = 3; i < temps.size(); ++i)
        for (double v : s.values[i]) EXPECT_EQ(v, 0.0);
    EXPECT_GE(s.closeness, 0.0);
}

TEST(GapOperator, ParallelSweepIsDeterministic) {
    const GapOperator op(separable(), kParams);
    const double tc = op.critical_temperature(1e-13).tc;
    std::vector<double> temps;
    for (int i = 1; i <= 12; ++i) temps.push_back(tc * i / 12.5);
    const auto a = op.sweep_temperature(temps, {}, tc, false, 1);
    const auto b = op.sweep_temperature(temps, {}, tc, false, 4);
    EXPECT_EQ(a.values, b.values);
}

TEST(GapOperator, LipschitzRatioWithinBound) {
    const GapOperator op(separable(), kParams);
    const double T = 0.05;
    const double d1 = op.lower().delta(T), d2 = op.upper().delta(T);
    const auto u = std::vector<double>(op.size(), d1), v = std::vector<double>(op.size(), d2);
    EXPECT_LT(op.lipschitz_ratio(T, u, v), op.lipschitz_bound());
    EXPECT_THROW(op.lipschitz_ratio(T, u, u), DomainError);
    EXPECT_NEAR(op.lipschitz_bound(), 3.0 * 0.5 * std::log(100.0), 1e-14);
}
