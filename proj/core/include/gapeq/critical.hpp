#pragma once

// Behaviour of the gap function as T -> T_c from below and the specific-heat jump.
//
// Near T_c the squared gap behaves as u(T, x)^2 = v(x) (T_c - T) + w(x) (T_c - T)^2 / 2 + ...,
// and the jump in C_V is
//
//   dC_V = -N0 / (8 T_c) * integral_{eps/2T_c}^{hw/2T_c} v(2 T_c eta)^2 g(eta) d eta.

#include <optional>
#include <span>
#include <vector>

#include "gapeq/gap_solver.hpp"
#include "gapeq/model.hpp"
#include "gapeq/simplified_gap.hpp"

namespace gapeq {

/// g(eta) = (sech^2 eta - tanh(eta) / eta) / eta^2, with g(0) = -2/3.
double g_function(double eta);
/// Taylor branch through eta^6 (used below 1e-2).
double g_taylor(double eta);
/// Closed-form branch; loses accuracy for small eta.
double g_direct(double eta);

/// Default offsets T_c - T, in units of T_c.
inline constexpr double kDefaultOffsets[] = {1e-2, 5e-3, 2.5e-3, 1.25e-3};

struct CriticalLimits {
    EnergyGrid grid;
    double tc = 0.0;
    std::vector<double> offsets;        ///< absolute T_c - T used in the fit
    std::vector<double> v, w;           ///< per node
    std::vector<double> v_confirm, w_confirm;  ///< same fit without the largest offset
    std::vector<double> fit_residual;   ///< per node, max |u^2 - fit| / max u^2 over the offsets

    /// How well v and w describe u^2 at each offset (sup over nodes); empty unless du/dT was available.
    std::vector<double> v_quotient_error;    ///< |v - u^2 / (T_c - T)| / T_c
    std::vector<double> v_derivative_error;  ///< |v + 2 u du/dT| / T_c
    std::vector<double> w_error;             ///< |w / 2 + (f + (T_c - T) df/dT) / (T_c - T)^2|

    /// v > 0 at every node.
    bool positive() const;
    /// max |v - v_confirm| / max |v|.
    double confirmation_spread() const;
    /// v at an arbitrary energy by the grid's interpolant.
    double v_at(double x) const { return grid.interpolate(v, x); }
};

/// Fits squares[k][j] = u(T_c - offsets[k], x_j)^2 to v h + w h^2 / 2 node by node.
/// Needs at least three offsets.
CriticalLimits fit_limits(const EnergyGrid& grid, double tc, std::span<const double> offsets,
                          const std::vector<std::vector<double>>& squares);

/// Solves the gap equation at T_c - offset for each offset (absolute units).
GapSurface critical_surface(const GapOperator& op, double tc, std::span<const double> offsets,
                            const SolverOptions& opts = {}, int threads = 1);

/// v and w from a surface whose temperatures lie below tc.
CriticalLimits estimate_limits(const GapSurface& surface, const EnergyGrid& grid, double tc);

/// Full extraction: solves at T_c (1 - kDefaultOffsets) unless `relative_offsets` is given,
/// fits, and fills the derivative diagnostics from du/dT.
CriticalLimits estimate_limits(const GapOperator& op, double tc, const SolverOptions& opts = {},
                               std::span<const double> relative_offsets = {}, int threads = 1);

/// Slope -f'(tau) = lim Delta(T)^2 / (tau - T) of a constant-coupling gap, same fit as above.
double simplified_limit_slope(const SimplifiedSolution& s, std::span<const double> relative_offsets = {});

/// (integral U(x_i, xi) sqrt(v(xi)) tanh(xi / 2T_c) / xi dxi)^2 on the grid nodes.
std::vector<double> F_of_x(const Kernel& k, const EnergyGrid& grid, std::span<const double> v, double tc);

/// Limit of the second T-derivative of (Au)^2 at T_c: the integral of U sqrt(v) tanh / xi
/// times the integral of U times the T-derivative of sqrt(u^2) tanh(E / 2T) / E. Requires v > 0.
std::vector<double> G_of_x(const Kernel& k, const EnergyGrid& grid, std::span<const double> v,
                           std::span<const double> w, double tc);

/// Relative sup-norm distance |a - b| / |b|.
double relative_sup_distance(std::span<const double> a, std::span<const double> b);

struct JumpReport {
    double tc = 0.0;
    double delta_cv = 0.0;       ///< the formula value
    double formula_value = 0.0;
    double psi_second_derivative = 0.0;  ///< d^2 Psi / dT^2 at T_c, = -formula / T_c
    std::optional<double> simplified_value;
    std::optional<double> numeric_value;
};

/// -N0 / (8 T_c) * integral v(2 T_c eta)^2 g(eta) d eta over [eps/2T_c, hw/2T_c].
double delta_cv_formula(const CriticalLimits& limits, const PhysicalParams& params, double tol = 1e-13);

JumpReport delta_cv(const CriticalLimits& limits, const PhysicalParams& params,
                    std::optional<double> numeric_value = {}, std::optional<double> simplified_value = {});

/// -N0 f'(T_c) tanh(hw / 2T_c). Throws DomainError for fprime_tc >= 0.
double delta_cv_constant_kernel(double fprime_tc, double tc, const PhysicalParams& params);

}  // namespace gapeq
