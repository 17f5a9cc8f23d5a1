#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gapeq/errors.hpp"
#include "gapeq/simplified_gap.hpp"
#include "gapeq/thermo.hpp"
#include "oracles.hpp"

using namespace gapeq;

namespace {

const PhysicalParams kParams{};
constexpr double kInf = std::numeric_limits<double>::infinity();

// Psi for a gap that is the same constant at every energy, straight from the definition.
double psi_oracle(double T, double delta) {
    auto f = [&](double x) {
        const double e = std::sqrt(x * x + delta * delta);
        return -2.0 * (e - x) + delta * delta * std::tanh(e / (2.0 * T)) / e -
               4.0 * T * (std::log1p(std::exp(-e / T)) - std::log1p(std::exp(-x / T)));
    };
    return kParams.n0 * oracle::simpson(f, kParams.epsilon, kParams.hbar_omega_d, 200000);
}

}  // namespace

TEST(OmegaN, ShellOnlyMatchesSeries) {
    const double T = 0.05;
    const double expected = -(1.0 - 1e-4) - 4.0 * T * oracle::fermi_log_integral(0.01, 1.0, T);
    EXPECT_NEAR(omega_n(T, kParams, DensityOfStates::zero()), expected, 1e-14);
    EXPECT_EQ(phi(T, kParams, DensityOfStates::zero()), 0.0);
    EXPECT_THROW(omega_n(0.0, kParams, DensityOfStates::zero()), DomainError);
}

TEST(Phi, ConstantDensityMatchesSeries) {
    const double c = 0.7, T = 0.3;
    const double expected = c * (1.0 - 100.0) -
                            2.0 * T * c * (oracle::fermi_log_integral(1.0, 10.0, T) + oracle::fermi_log_integral(1.0, kInf, T));
    EXPECT_NEAR(phi(T, kParams, DensityOfStates::constant(c)), expected, 1e-12);
}

TEST(Phi, FreeElectronAgainstSimpson) {
    const double c = 0.4, T = 0.2, mu = kParams.mu, hw = kParams.hbar_omega_d;
    const auto dos = DensityOfStates::free_electron(c, mu);
    // Below the shell substitute x = -mu + s^2 to remove the square-root endpoint.
    auto below = [&](double s) {
        const double x = -mu + s * s;
        return 2.0 * s * (2.0 * x * dos(x) - 2.0 * T * dos(x) * std::log1p(std::exp(x / T)));
    };
    auto tail = [&](double x) { return -2.0 * T * dos(x) * std::log1p(std::exp(-x / T)); };
    const double expected =
        oracle::simpson(below, 0.0, std::sqrt(mu - hw), 400000) + oracle::simpson(tail, hw, hw + 80.0 * T, 200000);
    EXPECT_NEAR(phi(T, kParams, dos), expected, 1e-9 * std::abs(expected));
}

TEST(Psi, VanishesForZeroGap) {
    const auto grid = EnergyGrid::for_params(kParams);
    const std::vector<double> u(grid.size(), 0.0);
    EXPECT_EQ(psi(0.05, kParams, grid, u), 0.0);
}

TEST(Psi, ConstantGapAgainstDirectIntegral) {
    const auto grid = EnergyGrid::for_params(kParams);
    for (double T : {0.02, 0.06})
        for (double d : {1e-3, 0.05, 0.2}) {
            const std::vector<double> u(grid.size(), d);
            const double ref = psi_oracle(T, d);
            EXPECT_NEAR(psi(T, kParams, grid, u), ref, 1e-9 * std::abs(ref) + 1e-15) << T << " " << d;
        }
}

TEST(ThermoModel, NormalAboveTc) {
    const GapOperator op(Kernel::constant(0.3, kParams), kParams);
    const double tc = transition_temperature(0.3, kParams);
    const ThermoModel m(op, DensityOfStates::zero(), tc);
    EXPECT_EQ(m.psi(1.2 * tc), 0.0);
    EXPECT_EQ(m.omega(1.2 * tc), m.omega_n(1.2 * tc));
    EXPECT_LT(m.psi(0.5 * tc), 0.0);
}

TEST(ThermoModel, PsiIsQuadraticNearTc) {
    const GapOperator op(Kernel::constant(0.3, kParams), kParams);
    const double tc = transition_temperature(0.3, kParams);
    const ThermoModel m(op, DensityOfStates::zero(), tc);
    const double q1 = m.psi(tc * (1.0 - 2e-3)) / std::pow(2e-3 * tc, 2);
    const double q2 = m.psi(tc * (1.0 - 1e-3)) / std::pow(1e-3 * tc, 2);
    EXPECT_LT(q1, 0.0);
    EXPECT_NEAR(q1 / q2, 1.0, 2e-3);
}

TEST(EntropyAndCv, QuadraticIsExact) {
    auto omega = [](double T) { return 1.0 - 2.0 * T - 3.0 * T * T; };
    const std::vector<double> temps{0.1, 0.3, 0.7};
    const auto curve = entropy_and_cv(omega, temps, 0.5, 1e-3);
    ASSERT_EQ(curve.points.size(), 3u);
    for (const auto& p : curve.points) {
        EXPECT_NEAR(p.entropy, 2.0 + 6.0 * p.T, 1e-8);
        EXPECT_NEAR(p.cv, 6.0 * p.T, 1e-5);
    }
    EXPECT_EQ(curve.points[0].side, Side::below);
    EXPECT_EQ(curve.points[2].side, Side::above);
}

TEST(EntropyAndCv, OneSidedStencilsNearTc) {
    auto omega = [](double T) { return T * T * T - 2.0 * T * T + T; };
    const double tc = 0.5, h = 1e-3;
    const std::vector<double> temps{tc - 1.5 * h, tc + 1.5 * h};
    const auto curve = entropy_and_cv(omega, temps, tc, h);
    for (const auto& p : curve.points) {
        EXPECT_NEAR(p.entropy, -(3.0 * p.T * p.T - 4.0 * p.T + 1.0), 1e-8);
        EXPECT_NEAR(p.cv, -p.T * (6.0 * p.T - 4.0), 1e-5);
    }
}

TEST(EntropyAndCv, RecoversSyntheticJump) {
    const double tc = 0.4, a = 3.0, b = 1.0;
    // Continuous Omega and S at tc, C_V jumps by 2 (a - b) tc.
    auto omega = [&](double T) {
        const double d = T - tc;
        return T < tc ? -T - a * d * d : -T - b * d * d;
    };
    const std::vector<double> temps{0.2, 0.6};
    const auto curve = entropy_and_cv(omega, temps, tc, 1e-3);
    EXPECT_NEAR(curve.cv_jump(), 2.0 * (a - b) * tc, 1e-5);
    EXPECT_NEAR(curve.tc_minus.entropy, curve.tc_plus.entropy, 1e-8);
    EXPECT_NEAR(curve.tc_minus.omega, curve.tc_plus.omega, 1e-10);
}

TEST(EntropyAndCv, RejectsUnplaceableStencils) {
    auto omega = [](double T) { return -T * T; };
    const std::vector<double> near_tc{0.5 - 5e-4};
    EXPECT_THROW(entropy_and_cv(omega, near_tc, 0.5, 1e-3), StencilError);
    const std::vector<double> near_zero{5e-4};
    EXPECT_THROW(entropy_and_cv(omega, near_zero, 0.5, 1e-3), StencilError);
}

TEST(EntropyAndCv, ThreadCountDoesNotChangeResults) {
    auto omega = [](double T) { return std::sin(T) * std::exp(-T); };
    const std::vector<double> temps{0.1, 0.2, 0.45, 0.55, 0.9};
    const auto a = entropy_and_cv(omega, temps, 0.5, 1e-3, true, 1);
    const auto b = entropy_and_cv(omega, temps, 0.5, 1e-3, true, 4);
    for (std::size_t i = 0; i < temps.size(); ++i) {
        EXPECT_EQ(a.points[i].entropy, b.points[i].entropy);
        EXPECT_EQ(a.points[i].cv, b.points[i].cv);
    }
    EXPECT_EQ(a.cv_jump(), b.cv_jump());
}
