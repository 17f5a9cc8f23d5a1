#include "gapeq/simplified_gap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gapeq/errors.hpp"
#include "gapeq/quadrature.hpp"
#include "gapeq/roots.hpp"

namespace gapeq {

namespace {

// Integral of tanh(E / 2T) / E at E^2 = xi^2 + s.
double pair_integral(double T, double s, const PhysicalParams& p, double tol) {
    return integrate([&](double xi) { return pair_weight(std::sqrt(xi * xi + s), T); },
                     p.epsilon, p.hbar_omega_d, tol, tol)
        .value;
}

double quadrature_tol(double tol) { return std::max(1e-15, 1e-2 * tol); }

}  // namespace

double delta0_closed_form(double coupling, const PhysicalParams& params) {
    params.validate();
    if (!(coupling > 0.0)) throw ParameterError("coupling must be positive");
    const double inv = 1.0 / coupling;
    const double a = params.hbar_omega_d - params.epsilon * std::exp(inv);
    const double b = params.hbar_omega_d - params.epsilon * std::exp(-inv);
    if (!(a > 0.0) || !(b > 0.0)) throw ParameterError("cutoff epsilon too large for coupling U");
    return std::sqrt(a * b) / std::sinh(inv);
}

double simplified_rhs(double coupling, double T, double delta, const PhysicalParams& params,
                      double tol) {
    if (T < 0.0) throw DomainError("simplified_rhs: T must be nonnegative");
    if (delta < 0.0) throw DomainError("simplified_rhs: delta must be nonnegative");
    return coupling * pair_integral(T, delta * delta, params, tol);
}

double transition_temperature(double coupling, const PhysicalParams& params, double tol) {
    params.validate();
    if (!(coupling > 0.0)) throw ParameterError("coupling must be positive");
    if (coupling * std::log(params.hbar_omega_d / params.epsilon) <= 1.0)
        throw ParameterError("coupling too weak for the cutoff: no transition temperature");

    const double qtol = quadrature_tol(tol);
    auto residual = [&](double tau) { return coupling * pair_integral(tau, 0.0, params, qtol) - 1.0; };
    // Weak-coupling estimate 2 e^gamma / pi * hw * e^{-1/U} seeds the bracket.
    const double guess = 2.0 * std::exp(std::numbers::egamma) / std::numbers::pi *
                         params.hbar_omega_d * std::exp(-1.0 / coupling);
    const auto [lo, hi] = bracket_geometric(residual, guess, 2.0);
    return brent(residual, lo, hi, 0.0).root;
}

double coupling_for_tc(double tc, const PhysicalParams& params, double tol) {
    params.validate();
    if (!(tc > 0.0)) throw DomainError("coupling_for_tc: tc must be positive");
    return 1.0 / pair_integral(tc, 0.0, params, quadrature_tol(tol));
}

namespace {

double solve_gap_squared(double coupling, double T, const PhysicalParams& p, double tol) {
    const double qtol = quadrature_tol(tol);
    auto residual = [&](double s) { return coupling * pair_integral(T, s, p, qtol) - 1.0; };
    // At or above the transition the only root is 0.
    if (residual(0.0) <= 0.0) return 0.0;
    double hi = p.hbar_omega_d * p.hbar_omega_d * 1e-6;
    while (residual(hi) > 0.0) hi *= 4.0;
    return brent(residual, 0.0, hi, 0.0).root;
}

}  // namespace

double solve_simplified(double coupling, double T, const PhysicalParams& params, double tol) {
    if (T < 0.0) throw DomainError("solve_simplified: T must be nonnegative");
    const double tau = transition_temperature(coupling, params, tol);
    if (T >= tau) return 0.0;
    return std::sqrt(solve_gap_squared(coupling, T, params, tol));
}

SimplifiedSolution::SimplifiedSolution(double coupling, const PhysicalParams& params,
                                       std::size_t memo_nodes, double tol)
    : params_(params), coupling_(coupling), tol_(tol) {
    tau_ = transition_temperature(coupling, params, tol);
    delta0_ = std::sqrt(solve_gap_squared(coupling, 0.0, params, tol));

    if (memo_nodes < 2) return;
    // Chebyshev-Lobatto nodes on [0, tau]; Delta^2 is smooth up to tau, Delta is not.
    const std::size_t n = memo_nodes;
    memo_t_.resize(n);
    memo_s_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double theta = std::numbers::pi * static_cast<double>(k) / static_cast<double>(n - 1);
        memo_t_[k] = 0.5 * tau_ * (1.0 - std::cos(theta));
    }
    memo_t_.front() = 0.0;
    memo_t_.back() = tau_;
    for (std::size_t k = 0; k < n; ++k) {
        const double d = k == 0 ? delta0_ : delta(memo_t_[k]);
        memo_s_[k] = d * d;
    }

    // Fritsch-Butland tangents keep the interpolant monotone.
    std::vector<double> secant(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k)
        secant[k] = (memo_s_[k + 1] - memo_s_[k]) / (memo_t_[k + 1] - memo_t_[k]);
    memo_slope_.assign(n, 0.0);
    memo_slope_.front() = secant.front();
    memo_slope_.back() = secant.back();
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double a = secant[k - 1], b = secant[k];
        if (a * b > 0.0) {
            const double h0 = memo_t_[k] - memo_t_[k - 1], h1 = memo_t_[k + 1] - memo_t_[k];
            const double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
            memo_slope_[k] = (w1 + w2) / (w1 / a + w2 / b);
        }
    }
}

double SimplifiedSolution::delta(double T) const {
    if (T < 0.0) throw DomainError("SimplifiedSolution::delta: T must be nonnegative");
    if (T >= tau_) return 0.0;
    if (T == 0.0) return delta0_;
    return std::sqrt(solve_gap_squared(coupling_, T, params_, tol_));
}

double SimplifiedSolution::interpolated(double T) const {
    if (T < 0.0) throw DomainError("SimplifiedSolution::interpolated: T must be nonnegative");
    if (T >= tau_) return 0.0;
    if (memo_t_.empty()) return delta(T);
    auto it = std::upper_bound(memo_t_.begin() + 1, memo_t_.end() - 1, T);
    const std::size_t k = static_cast<std::size_t>(it - memo_t_.begin()) - 1;
    const double h = memo_t_[k + 1] - memo_t_[k];
    const double t = (T - memo_t_[k]) / h;
    const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    const double h10 = t * (1.0 - t) * (1.0 - t);
    const double h01 = t * t * (3.0 - 2.0 * t);
    const double h11 = t * t * (t - 1.0);
    const double s = h00 * memo_s_[k] + h10 * h * memo_slope_[k] + h01 * memo_s_[k + 1] +
                     h11 * h * memo_slope_[k + 1];
    return std::sqrt(std::max(s, 0.0));
}

}  // namespace gapeq
