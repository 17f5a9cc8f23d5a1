#include <gtest/gtest.h>

#include <cmath>

#include "gapeq/roots.hpp"

using namespace gapeq;

TEST(Brent, FindsCubicRoot) {
    const auto r = brent([](double x) { return x * x * x - 2.0; }, 0.0, 2.0, 1e-15);
    EXPECT_NEAR(r.root, std::cbrt(2.0), 1e-14);
    EXPECT_LE(r.lo, r.root);
    EXPECT_GE(r.hi, r.root);
    EXPECT_LT(r.iterations, 60);
}

TEST(Brent, EndpointRoot) {
    const auto r = brent([](double x) { return x - 1.0; }, 1.0, 3.0, 1e-15);
    EXPECT_EQ(r.root, 1.0);
}

TEST(Brent, RejectsMissingSignChange) {
    EXPECT_ANY_THROW(brent([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12));
}

TEST(Brent, SteepFunction) {
    const auto r = brent([](double x) { return std::tanh(50.0 * (x - 0.3)); }, 0.0, 1.0, 1e-14);
    EXPECT_NEAR(r.root, 0.3, 1e-13);
}

TEST(BracketGeometric, GrowsUntilSignChange) {
    auto f = [](double x) { return std::log(x) - 5.0; };
    const auto [lo, hi] = bracket_geometric(f, 1.0);
    EXPECT_LE(f(lo) * f(hi), 0.0);
    EXPECT_LE(lo, std::exp(5.0));
    EXPECT_GE(hi, std::exp(5.0));
}
