#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "gapeq/model.hpp"

namespace gapeq {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
};

/// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre_rule(std::size_t n);

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
///
/// Panels with the largest |K15 - G7| are bisected until the summed estimate is
/// below max(tol, rel_tol * |value|) or `max_panels` is reached; in the latter case
/// the best value is returned with its (larger) error estimate.
/// Throws EvaluationError carrying the abscissa if f returns a non-finite value.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double tol, double rel_tol = 0.0, std::size_t max_panels = 4000);

/// integral_a^inf N(x) ln(1 + exp(-x / T)) dx.
///
/// The upper limit is chosen so that the discarded tail, bounded by
/// C * integral sqrt(x) exp(-x / T) dx with C = n.growth_constant(a), is below tol / 2.
QuadratureResult integrate_fermi_tail(const DensityOfStates& n, double a, double T, double tol);

/// integral_z^inf sqrt(x) exp(-x) dx = Gamma(3/2, z).
double upper_gamma_three_halves(double z);

/// ln(1 + exp(-y)) without overflow for negative y.
double log1p_exp_neg(double y);

}  // namespace gapeq
