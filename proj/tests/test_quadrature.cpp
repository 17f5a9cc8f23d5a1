#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gapeq/errors.hpp"
#include "gapeq/quadrature.hpp"
#include "oracles.hpp"

using namespace gapeq;

TEST(Integrate, Polynomial) {
    const auto r = integrate([](double x) { return x; }, 0.0, 1.0, 1e-14);
    EXPECT_NEAR(r.value, 0.5, 1e-15);
}

TEST(Integrate, LogarithmicIntegrand) {
    const auto r = integrate([](double x) { return 1.0 / x; }, 0.01, 1.0, 1e-13);
    EXPECT_NEAR(r.value, std::log(100.0), 1e-12);
}

TEST(Integrate, PairWeightAgainstSimpson) {
    auto f = [](double x) { return std::tanh(x / 0.4) / x; };
    const auto r = integrate(f, 0.01, 1.0, 1e-13);
    EXPECT_NEAR(r.value, oracle::simpson(f, 0.01, 1.0), 1e-9);
}

TEST(Integrate, NonFiniteIntegrandReportsAbscissa) {
    auto f = [](double x) { return x > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 1.0; };
    try {
        integrate(f, 0.0, 1.0, 1e-10);
        FAIL() << "expected EvaluationError";
    } catch (const EvaluationError& e) {
        EXPECT_GT(e.abscissa(), 0.5);
        EXPECT_LE(e.abscissa(), 1.0);
    }
}

TEST(FermiTail, ConstantDensityMatchesSeries) {
    // T sum (-1)^{k+1} e^{-k a / T} / k^2 with a = 1, T = 0.1 is 4.539942e-6.
    const auto r = integrate_fermi_tail(DensityOfStates::constant(1.0), 1.0, 0.1, 1e-16);
    const double expected = oracle::fermi_log_integral(1.0, std::numeric_limits<double>::infinity(), 0.1);
    EXPECT_NEAR(expected, 4.539942e-6, 1e-12);
    EXPECT_NEAR(r.value, expected, 1e-14);
}

TEST(FermiTail, FreeElectronAgainstSimpson) {
    const auto n = DensityOfStates::free_electron(0.3, 10.0);
    const double a = 1.0, T = 0.2;
    const auto r = integrate_fermi_tail(n, a, T, 1e-14);
    auto f = [&](double x) { return n(x) * std::log1p(std::exp(-x / T)); };
    EXPECT_NEAR(r.value, oracle::simpson(f, a, a + 80.0 * T, 200000), 1e-12);
}

TEST(FermiTail, ZeroDensity) {
    EXPECT_EQ(integrate_fermi_tail(DensityOfStates::zero(), 1.0, 0.1, 1e-14).value, 0.0);
}

TEST(UpperGamma, ThreeHalves) {
    EXPECT_NEAR(upper_gamma_three_halves(0.0), std::sqrt(M_PI) / 2.0, 1e-15);
    // Gamma(3/2, z) = sqrt(z) e^{-z} + sqrt(pi)/2 erfc(sqrt z)
    for (double z : {0.1, 1.0, 5.0, 30.0}) {
        const double ref = std::sqrt(z) * std::exp(-z) + std::sqrt(M_PI) / 2.0 * std::erfc(std::sqrt(z));
        EXPECT_NEAR(upper_gamma_three_halves(z), ref, 1e-14 * std::max(1.0, ref)) << z;
    }
}

TEST(Log1pExpNeg, StableForBothSigns) {
    EXPECT_NEAR(log1p_exp_neg(0.0), std::log(2.0), 1e-16);
    EXPECT_NEAR(log1p_exp_neg(50.0), std::exp(-50.0), 1e-35);
    EXPECT_NEAR(log1p_exp_neg(-800.0), 800.0, 1e-12);
    EXPECT_TRUE(std::isfinite(log1p_exp_neg(-1e6)));
}

TEST(GaussLegendreRule, SymmetricAndExact) {
    const auto [x, w] = gauss_legendre_rule(20);
    ASSERT_EQ(x.size(), 20u);
    double sw = 0.0, m38 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_NEAR(x[i], -x[x.size() - 1 - i], 1e-15);
        sw += w[i];
        m38 += w[i] * std::pow(x[i], 38);
    }
    EXPECT_NEAR(sw, 2.0, 1e-14);
    EXPECT_NEAR(m38, 2.0 / 39.0, 1e-14);
}
