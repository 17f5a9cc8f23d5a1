#pragma once

// Nystrom discretization of the gap operator
//
//   (Bu)(x) = integral_eps^{hw} U(x, xi) u(xi) tanh(E / 2T) / E dxi,  E = sqrt(xi^2 + u(xi)^2),
//
// on a fixed EnergyGrid, its positive fixed point u0(T, .), the transition
// temperature T_c, and temperature sweeps u0(T_i, x_j).

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "gapeq/model.hpp"
#include "gapeq/simplified_gap.hpp"

namespace gapeq {

enum class IterationMethod { picard, anderson, newton };
enum class Phase { superconducting, normal };

std::string_view to_string(IterationMethod m);
std::string_view to_string(Phase p);
IterationMethod parse_iteration_method(std::string_view name);

struct SolverOptions {
    double tol = 1e-12;              ///< sup-norm residual |u - Bu|
    int max_iter = 500;
    double damping = 1.0;            ///< initial relaxation for picard/anderson; halved on residual growth
    IterationMethod method = IterationMethod::newton;
    std::size_t anderson_depth = 3;
    int picard_warmup = 0;           ///< plain iterations before switching to `method`
    double zero_threshold_factor = 1e-10;  ///< normal iff sup u < factor * Delta_2(0)
};

struct GapSolution {
    double T = 0.0;
    std::vector<double> values;          ///< u0(T, x_j) on the operator's grid
    int iterations = 0;
    double residual = 0.0;               ///< sup |u - Bu| at exit
    Phase phase = Phase::normal;
    std::vector<double> residual_history;
    bool damping_engaged = false;        ///< plain iteration grew the residual at some step

    double sup() const;
    double inf() const;
};

struct GapSurface {
    std::vector<double> temperatures;
    std::vector<std::vector<double>> values;  ///< values[i][j] = u0(T_i, x_j)
    std::vector<int> iterations;
    std::vector<double> residuals;
    double tc = 0.0;
    double closeness = 0.0;  ///< sup over the T grid of Delta_2(T) - Delta_1(T)
};

struct UniquenessReport {
    bool agree = false;
    double gap = 0.0;  ///< sup-norm distance between the two converged solutions
    GapSolution from_upper;
    GapSolution from_lower;
};

struct TcResult {
    double tc = 0.0;
    double lo = 0.0, hi = 0.0;  ///< final bracket
    std::vector<std::pair<double, Phase>> history;
};

class GapOperator {
public:
    GapOperator(Kernel kernel, const PhysicalParams& params, EnergyGrid grid);
    GapOperator(Kernel kernel, const PhysicalParams& params, std::size_t nodes = 64);

    const Kernel& kernel() const { return kernel_; }
    const PhysicalParams& params() const { return params_; }
    const EnergyGrid& grid() const { return grid_; }
    std::size_t size() const { return grid_.size(); }

    /// Delta_1 (coupling u1) and Delta_2 (coupling u2).
    const SimplifiedSolution& lower() const { return lower_; }
    const SimplifiedSolution& upper() const { return upper_; }
    double zero_threshold(const SolverOptions& opts) const;

    /// U(x_i, xi_j) * w_j, row-major.
    std::span<const double> weighted_kernel() const { return kw_; }

    /// (Bu)(x_i) at every node. Throws DomainError for negative entries or T < 0.
    std::vector<double> apply_b(double T, std::span<const double> u) const;

    /// (Bu)(x) at an arbitrary x in [eps, hw]; at a fixed point this is the Nystrom interpolant.
    double nystrom_value(double T, std::span<const double> u, double x) const;

    /// Positive fixed point of B starting from `initial` (default: u = Delta_2(T)).
    /// Throws NonConvergenceError with the residual history when max_iter is exhausted.
    GapSolution solve_fixed_point(double T, const SolverOptions& opts = {},
                                  std::span<const double> initial = {}) const;

    /// du0/dT at the nodes from the implicit function theorem, (I - B'(u)) du/dT = dB/dT.
    std::vector<double> temperature_derivative(const GapSolution& sol) const;

    /// Fixed points reached from u = Delta_2(T) and from lower_start(T).
    UniquenessReport uniqueness_probe(double T, const SolverOptions& opts = {}) const;

    /// A positive subsolution: Delta_1(T) below tau_1, otherwise the largest subsolution
    /// along the Perron vector of B'(0).
    std::vector<double> lower_start(double T) const;

    /// |Bu - Bv|_inf / |u - v|_inf. Throws DomainError when u == v.
    double lipschitz_ratio(double T, std::span<const double> u, std::span<const double> v) const;

    /// 3 * U2 * ln(hw / eps).
    double lipschitz_bound() const;

    /// Bisection on [tau_1, tau_2] (widened by 1e-6 relative) over "the fixed point is normal".
    /// `tol` is the absolute width of the final bracket.
    TcResult critical_temperature(double tol, const SolverOptions& opts = {}) const;

    /// Solves every slice (warm starts clamped into [Delta_1, Delta_2]); slices at or above
    /// tc are set to zero. tc < 0 locates T_c first.
    GapSurface sweep_temperature(std::span<const double> temperatures, const SolverOptions& opts = {},
                                 double tc = -1.0, bool warm_start = true, int threads = 1) const;

    /// max(u - Delta_2(T), Delta_1(T) - u, 0) over the nodes.
    double sandwich_excess(const GapSolution& sol) const;

private:
    std::vector<double> constant_vector(double value) const { return std::vector<double>(size(), value); }
    void audit_zero_propagation(const GapSolution& sol, const SolverOptions& opts) const;

    Kernel kernel_;
    PhysicalParams params_;
    EnergyGrid grid_;
    std::vector<double> kw_;
    SimplifiedSolution lower_, upper_;
};

}  // namespace gapeq
