#include <gtest/gtest.h>

#include <cmath>

#include "gapeq/errors.hpp"
#include "gapeq/simplified_gap.hpp"
#include "oracles.hpp"

using namespace gapeq;

namespace {

const PhysicalParams kParams{};

// U * integral of tanh(E / 2T) / E by Simpson, for the oracle root searches.
double rhs_oracle(double U, double T, double delta) {
    auto f = [&](double xi) {
        const double e = std::sqrt(xi * xi + delta * delta);
        return std::tanh(e / (2.0 * T)) / e;
    };
    return U * oracle::simpson(f, kParams.epsilon, kParams.hbar_omega_d, 20000);
}

}  // namespace

TEST(SimplifiedGap, ClosedFormSolvesZeroTemperatureEquation) {
    for (double U : {0.25, 0.3, 0.5, 1.0}) {
        // asinh(hw / D) - asinh(eps / D) = 1 / U, solved by bisection.
        const double ref = oracle::bisect(
            [&](double d) { return std::asinh(1.0 / d) - std::asinh(0.01 / d) - 1.0 / U; }, 1e-8, 10.0);
        EXPECT_NEAR(delta0_closed_form(U, kParams), ref, 1e-13 * std::max(1.0, ref)) << U;
    }
}

TEST(SimplifiedGap, NoSolutionForWeakCouplingAndLargeCutoff) {
    const double U = 0.9 / std::log(100.0);  // U ln(hw / eps) < 1
    EXPECT_THROW(delta0_closed_form(U, kParams), ParameterError);
    EXPECT_THROW(transition_temperature(U, kParams), ParameterError);
    EXPECT_THROW(solve_simplified(U, 0.01, kParams), ParameterError);
}

TEST(SimplifiedGap, TransitionTemperatureMatchesBisection) {
    for (double U : {0.25, 0.5}) {
        const double tau = transition_temperature(U, kParams);
        const double ref = oracle::bisect([&](double T) { return 1.0 - rhs_oracle(U, T, 0.0); }, 1e-3, 1.0, 60);
        EXPECT_NEAR(tau, ref, 1e-11) << U;
        EXPECT_NEAR(simplified_rhs(U, tau, 0.0, kParams), 1.0, 1e-13);
    }
}

TEST(SimplifiedGap, FiniteTemperatureGapMatchesBisection) {
    const double U = 0.3;
    const double tau = transition_temperature(U, kParams);
    for (double frac : {0.1, 0.5, 0.9, 0.99}) {
        const double T = frac * tau;
        const double ref = oracle::bisect([&](double d) { return rhs_oracle(U, T, d) - 1.0; }, 0.0, 1.0, 60);
        EXPECT_NEAR(solve_simplified(U, T, kParams), ref, 1e-11) << frac;
    }
}

TEST(SimplifiedGap, ZeroAtAndAboveTau) {
    const double U = 0.3;
    const double tau = transition_temperature(U, kParams);
    EXPECT_EQ(solve_simplified(U, tau, kParams), 0.0);
    EXPECT_EQ(solve_simplified(U, 1.5 * tau, kParams), 0.0);
    EXPECT_GT(solve_simplified(U, tau * (1.0 - 1e-6), kParams), 0.0);
}

TEST(SimplifiedGap, MonotoneInTemperatureAndCoupling) {
    const SimplifiedSolution a(0.3, kParams), b(0.35, kParams);
    double prev = a.delta(1e-4);
    for (int i = 1; i < 50; ++i) {
        const double d = a.delta(a.tau() * i / 50.0);
        EXPECT_LE(d, prev + 1e-15);
        EXPECT_LT(d, b.delta(a.tau() * i / 50.0));
        prev = d;
    }
    EXPECT_NEAR(a.delta0(), delta0_closed_form(0.3, kParams), 1e-14);
}

TEST(SimplifiedGap, CouplingForTcInvertsTau) {
    for (double U : {0.25, 0.4}) {
        const double tau = transition_temperature(U, kParams);
        EXPECT_NEAR(coupling_for_tc(tau, kParams), U, 1e-11);
    }
}

TEST(SimplifiedGap, InterpolatedTableMatchesExactSolve) {
    const SimplifiedSolution s(0.3, kParams);
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double T = s.tau() * i / 200.0;
        worst = std::max(worst, std::abs(s.interpolated(T) - s.delta(T)));
    }
    EXPECT_LT(worst, 1e-4 * s.delta0());
}
