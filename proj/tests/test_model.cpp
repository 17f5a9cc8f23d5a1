#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "gapeq/errors.hpp"
#include "gapeq/model.hpp"

using namespace gapeq;

TEST(PhysicalParams, RejectsInvalidOrdering) {
    PhysicalParams p;
    EXPECT_NO_THROW(p.validate());
    p.epsilon = 2.0;
    EXPECT_THROW(p.validate(), ParameterError);
    p = {};
    p.mu = 0.5;
    EXPECT_THROW(p.validate(), ParameterError);
    p = {};
    p.n0 = 0.0;
    EXPECT_THROW(p.validate(), ParameterError);
}

TEST(EnergyGrid, GaussLegendreIsExactForPolynomials) {
    const auto g = EnergyGrid::gauss_legendre(0.01, 1.0, 16);
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::pow(g.nodes()[i], 31);
    EXPECT_NEAR(g.integrate(f), (1.0 - std::pow(0.01, 32)) / 32.0, 1e-15);
}

TEST(EnergyGrid, NodesAreInsideAndIncreasing) {
    const auto g = EnergyGrid::composite(0.01, 1.0, 4, 12, 1.5);
    EXPECT_EQ(g.size(), 48u);
    EXPECT_EQ(g.panels(), 4u);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_GT(g.nodes()[i], 0.01);
        EXPECT_LT(g.nodes()[i], 1.0);
        if (i) EXPECT_GT(g.nodes()[i], g.nodes()[i - 1]);
    }
    double w = 0.0;
    for (double x : g.weights()) w += x;
    EXPECT_NEAR(w, 0.99, 1e-14);
}

TEST(EnergyGrid, InterpolationOfSmoothFunction) {
    const auto g = EnergyGrid::gauss_legendre(0.01, 1.0, 32);
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::exp(-3.0 * g.nodes()[i]) * std::sin(4.0 * g.nodes()[i]);
    for (double x : {0.01, 0.0123, 0.25, 0.5, 0.777, 1.0})
        EXPECT_NEAR(g.interpolate(f, x), std::exp(-3.0 * x) * std::sin(4.0 * x), 1e-13) << x;
    EXPECT_THROW(g.interpolate(f, 1.5), DomainError);
}

TEST(EnergyGrid, RefinedDoublesNodes) {
    const auto g = EnergyGrid::composite(0.01, 1.0, 2, 16);
    const auto r = g.refined();
    EXPECT_EQ(r.size(), 64u);
    EXPECT_EQ(r.panels(), 2u);
}

TEST(Kernel, ConstantPassesItsBounds) {
    const PhysicalParams p;
    const Kernel k = Kernel::constant(0.5, p);
    const auto rep = validate_kernel(k, EnergyGrid::for_params(p));
    EXPECT_TRUE(rep.pass());
    EXPECT_EQ(rep.min, 0.5);
    EXPECT_EQ(rep.max, 0.5);
    EXPECT_TRUE(k.is_constant());
}

TEST(Kernel, SeparableBelowDeclaredLowerBoundFails) {
    const PhysicalParams p;
    // 0.4 + 0.2 x xi ranges over [0.40002, 0.6].
    const Kernel k(SeparableCoupling{0.4, {0.2}}, 0.45, 0.6, p);
    const auto rep = validate_kernel(k, EnergyGrid::for_params(p));
    EXPECT_FALSE(rep.lower_ok);
    EXPECT_TRUE(rep.upper_ok);
    EXPECT_FALSE(rep.pass());
}

TEST(Kernel, SeparableIsSymmetric) {
    const PhysicalParams p;
    const Kernel k(SeparableCoupling{0.4, {0.05, 0.03}}, 0.4, 0.5, p);
    for (double x : {0.01, 0.3, 0.9})
        for (double y : {0.02, 0.5, 1.0}) EXPECT_DOUBLE_EQ(k(x, y), k(y, x));
    EXPECT_NEAR(k(0.5, 0.5), 0.4 + 0.05 * 0.25 + 0.03 * 0.0625, 1e-15);
}

TEST(Kernel, OutsideShellThrows) {
    const PhysicalParams p;
    const Kernel k = Kernel::constant(0.5, p);
    EXPECT_THROW(k(0.001, 0.5), DomainError);
    EXPECT_THROW(k(0.5, 1.5), DomainError);
    EXPECT_THROW(Kernel(ConstantCoupling{0.5}, 0.6, 0.5, p), ParameterError);
}

TEST(Kernel, TabulatedSampleMatchesBruteForceRange) {
    const PhysicalParams p;
    std::vector<double> t;
    for (int i = 0; i <= 40; ++i) t.push_back(0.01 + 0.99 * i / 40.0);
    auto f = [](double x, double y) { return 0.4 + 0.1 * x * y; };
    const Kernel k(BicubicSpline::sample(f, t, t), 0.4, 0.5, p);
    const auto rep = validate_kernel(k, EnergyGrid::for_params(p));
    // Oracle: brute-force extremes of the sampled function over a fine grid.
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i <= 1000; ++i)
        for (int j = 0; j <= 1000; ++j) {
            const double v = f(0.01 + 0.99 * i / 1000.0, 0.01 + 0.99 * j / 1000.0);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    EXPECT_NEAR(rep.min, lo, 1e-4);
    EXPECT_NEAR(rep.max, hi, 1e-4);
    EXPECT_TRUE(rep.pass());
}

TEST(BicubicSpline, ReproducesBilinearExactly) {
    std::vector<double> t{0.0, 0.3, 0.5, 1.0};
    auto f = [](double x, double y) { return 1.0 + 2.0 * x - y + 0.5 * x * y; };
    const auto s = BicubicSpline::sample(f, t, t);
    for (double x : {0.1, 0.45, 0.8})
        for (double y : {0.05, 0.6, 0.99}) EXPECT_NEAR(s(x, y), f(x, y), 1e-14);
}

TEST(BicubicSpline, ConvergesForSmoothFunction) {
    auto f = [](double x, double y) { return std::exp(-2.0 * (x - y) * (x - y)) * (x + y); };
    auto error = [&](int n) {
        std::vector<double> t;
        for (int i = 0; i <= n; ++i) t.push_back(0.01 + 0.99 * i / n);
        const auto s = BicubicSpline::sample(f, t, t);
        double e = 0.0;
        for (int i = 0; i <= 97; ++i)
            for (int j = 0; j <= 97; ++j) {
                const double x = 0.2 + 0.6 * i / 97.0, y = 0.2 + 0.6 * j / 97.0;
                e = std::max(e, std::abs(s(x, y) - f(x, y)));
            }
        return e;
    };
    const double e20 = error(20), e40 = error(40);
    EXPECT_LT(e40, 1e-5);
    EXPECT_LT(e40, e20 / 8.0);  // interior fourth-order convergence
}

TEST(BicubicSpline, CsvRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "gapeq_table_test.csv";
    {
        std::ofstream out(path);
        out << "x\\xi,0.01,0.5,1.0\n0.01,0.4,0.41,0.42\n0.5,0.41,0.43,0.45\n1.0,0.42,0.45,0.5\n";
    }
    const auto s = BicubicSpline::from_csv(path);
    EXPECT_EQ(s.x().size(), 3u);
    EXPECT_EQ(s.y().size(), 3u);
    EXPECT_DOUBLE_EQ(s(0.5, 1.0), 0.45);
    EXPECT_DOUBLE_EQ(s(1.0, 0.5), 0.45);
    std::filesystem::remove(path);
    EXPECT_THROW(BicubicSpline::from_csv(path), ConfigError);
}

TEST(DensityOfStates, FormsAndGrowthBound) {
    EXPECT_TRUE(DensityOfStates::zero().is_zero());
    EXPECT_EQ(DensityOfStates::zero()(3.0), 0.0);
    const auto c = DensityOfStates::constant(2.0);
    EXPECT_EQ(c(-5.0), 2.0);
    EXPECT_NEAR(c.growth_constant(4.0), 1.0, 1e-15);  // 2 <= C sqrt(x) for x >= 4
    const auto fe = DensityOfStates::free_electron(1.0, 10.0);
    EXPECT_NEAR(fe(6.0), 4.0, 1e-15);
    const double C = fe.growth_constant(1.0);
    for (double x : {1.0, 2.0, 10.0, 100.0, 1e6}) EXPECT_LE(fe(x), C * std::sqrt(x) * (1.0 + 1e-14));
}
