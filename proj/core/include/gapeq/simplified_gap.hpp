#pragma once

// Constant-coupling gap equation
//
//   1 = U * integral_eps^{hbar omega_D} tanh(E / 2T) / E dxi,   E = sqrt(xi^2 + Delta^2),
//
// its zero-temperature closed form, and its transition temperature tau(U).
// Delta_1 = Delta(U1) and Delta_2 = Delta(U2) bound the full gap function.

#include <cmath>
#include <cstddef>
#include <vector>

#include "gapeq/model.hpp"

namespace gapeq {

/// tanh(E / 2T) / E, with the tanh factor replaced by 1 at T = 0.
inline double pair_weight(double energy, double T) {
    if (T <= 0.0) return 1.0 / energy;
    return std::tanh(energy / (2.0 * T)) / energy;
}

/// sqrt((hw - eps e^{1/U}) (hw - eps e^{-1/U})) / sinh(1/U).
/// Throws ParameterError when the cutoff is too large for the coupling.
double delta0_closed_form(double coupling, const PhysicalParams& params);

/// U * integral tanh(E / 2T) / E over [eps, hbar omega_D]; `tol` is the quadrature tolerance.
double simplified_rhs(double coupling, double T, double delta, const PhysicalParams& params,
                      double tol = 1e-15);

/// tau with simplified_rhs(U, tau, 0) = 1. Throws ParameterError if U ln(hw/eps) <= 1
/// (no superconducting phase for this cutoff).
double transition_temperature(double coupling, const PhysicalParams& params, double tol = 1e-13);

/// U3 = 1 / integral tanh(xi / 2 tc) / xi dxi.
double coupling_for_tc(double tc, const PhysicalParams& params, double tol = 1e-13);

/// Unique Delta(T) >= 0 with simplified_rhs = 1 for T < tau; 0 for T >= tau.
double solve_simplified(double coupling, double T, const PhysicalParams& params, double tol = 1e-13);

/// Delta(T) for one coupling, with a Chebyshev-node table of Delta^2 for fast queries.
class SimplifiedSolution {
public:
    SimplifiedSolution(double coupling, const PhysicalParams& params, std::size_t memo_nodes = 33,
                       double tol = 1e-13);

    double coupling() const { return coupling_; }
    double tau() const { return tau_; }
    double delta0() const { return delta0_; }

    /// Exact root solve; 0 wherever the equation has no positive root (T >= tau).
    double delta(double T) const;

    /// Monotone cubic interpolation of Delta^2 over the memo table (no root solves).
    /// About 1e-4 relative with the default 33 nodes; use delta() where accuracy matters.
    double interpolated(double T) const;

private:
    PhysicalParams params_;
    double coupling_;
    double tol_;
    double tau_;
    double delta0_;
    std::vector<double> memo_t_, memo_s_, memo_slope_;
};

}  // namespace gapeq
