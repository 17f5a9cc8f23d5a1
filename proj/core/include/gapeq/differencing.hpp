#pragma once

#include <span>
#include <vector>

namespace gapeq {

/// Weights c_k with f^(m)(x0) ~ sum_k c_k f(x_k) (Fornberg's recursion), exact for
/// polynomials of degree < x.size().
std::vector<double> fd_weights(double x0, std::span<const double> x, int derivative);

/// Combines estimates at step h (fine) and 2h (coarse) whose leading error is O(h^order).
inline double richardson(double fine, double coarse, int order) {
    const double f = static_cast<double>(1 << order);
    return fine + (fine - coarse) / (f - 1.0);
}

}  // namespace gapeq
