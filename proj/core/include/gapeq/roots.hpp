#pragma once

#include <functional>
#include <utility>

namespace gapeq {

struct RootResult {
    double root;
    double lo, hi;  ///< final bracket
    int iterations;
};

/// Brent's method (bisection safeguarding secant / inverse quadratic steps).
/// f(lo) and f(hi) must have opposite signs or one of them must vanish.
/// Stops when the bracket is narrower than xtol + 4 * eps * |x|.
RootResult brent(const std::function<double(double)>& f, double lo, double hi, double xtol,
                 int max_iter = 200);

/// Geometric growth of [lo, hi] away from `start` until f changes sign; f must be monotone.
/// Returns the bracket as {lo, hi}.
std::pair<double, double> bracket_geometric(const std::function<double(double)>& f, double start,
                                            double factor = 2.0, int max_steps = 200);

}  // namespace gapeq
