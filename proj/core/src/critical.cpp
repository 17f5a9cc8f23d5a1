#include "gapeq/critical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gapeq/errors.hpp"
#include "gapeq/parallel.hpp"
#include "gapeq/quadrature.hpp"

namespace gapeq {

namespace {

double sech2(double y) {
    y = std::abs(y);
    if (y > 20.0) {
        const double e = std::exp(-2.0 * y);
        return 4.0 * e / ((1.0 + e) * (1.0 + e));
    }
    const double c = std::cosh(y);
    return 1.0 / (c * c);
}

std::vector<double> absolute_offsets(double tc, std::span<const double> relative) {
    std::vector<double> out;
    if (relative.empty()) relative = kDefaultOffsets;
    for (double r : relative) out.push_back(r * tc);
    return out;
}

// Least squares y = a h + b h^2 / 2 over (h_k, y_k). h is scaled by `scale` for conditioning.
std::pair<double, double> fit_linear_quadratic(std::span<const double> h, std::span<const double> y, double scale) {
    double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        const double p = h[k] / scale;
        const double q = 0.5 * p * p;
        s11 += p * p;
        s12 += p * q;
        s22 += q * q;
        r1 += p * y[k];
        r2 += q * y[k];
    }
    const double det = s11 * s22 - s12 * s12;
    const double a = (r1 * s22 - r2 * s12) / det;
    const double b = (s11 * r2 - s12 * r1) / det;
    return {a / scale, b / (scale * scale)};
}

}  // namespace

double g_taylor(double eta) {
    const double e2 = eta * eta;
    return -2.0 / 3.0 + e2 * (8.0 / 15.0 + e2 * (-34.0 / 105.0 + e2 * (496.0 / 2835.0)));
}

double g_direct(double eta) {
    if (eta == 0.0) return -2.0 / 3.0;
    return (sech2(eta) - std::tanh(eta) / eta) / (eta * eta);
}

double g_function(double eta) {
    if (!(eta >= 0.0)) throw DomainError("g_function: require eta >= 0");
    return eta < 1e-2 ? g_taylor(eta) : g_direct(eta);
}

bool CriticalLimits::positive() const {
    return !v.empty() && std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
}

double CriticalLimits::confirmation_spread() const {
    double diff = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        diff = std::max(diff, std::abs(v[j] - v_confirm[j]));
        scale = std::max(scale, std::abs(v[j]));
    }
    return scale > 0.0 ? diff / scale : diff;
}

CriticalLimits fit_limits(const EnergyGrid& grid, double tc, std::span<const double> offsets,
                          const std::vector<std::vector<double>>& squares) {
    if (offsets.size() < 3) throw DomainError("fit_limits: need at least three offsets");
    if (squares.size() != offsets.size()) throw DomainError("fit_limits: one slice per offset required");
    for (double h : offsets)
        if (!(h > 0.0)) throw DomainError("fit_limits: offsets must be positive");
    const std::size_t n = grid.size();
    for (const auto& s : squares)
        if (s.size() != n) throw DomainError("fit_limits: slice does not match the grid");

    CriticalLimits out{grid, tc, std::vector<double>(offsets.begin(), offsets.end()), {}, {}, {}, {}, {}, {}, {}, {}};
    out.v.resize(n);
    out.w.resize(n);
    out.v_confirm.resize(n);
    out.w_confirm.resize(n);
    out.fit_residual.resize(n);

    // Confirmation fit drops the largest offset.
    const std::size_t largest = static_cast<std::size_t>(
        std::max_element(offsets.begin(), offsets.end()) - offsets.begin());
    std::vector<double> h_small;
    for (std::size_t k = 0; k < offsets.size(); ++k)
        if (k != largest) h_small.push_back(offsets[k]);
    const double scale = offsets[largest];

    std::vector<double> y(offsets.size()), y_small;
    for (std::size_t j = 0; j < n; ++j) {
        y_small.clear();
        double ymax = 0.0;
        for (std::size_t k = 0; k < offsets.size(); ++k) {
            y[k] = squares[k][j];
            ymax = std::max(ymax, std::abs(y[k]));
            if (k != largest) y_small.push_back(y[k]);
        }
        std::tie(out.v[j], out.w[j]) = fit_linear_quadratic(offsets, y, scale);
        std::tie(out.v_confirm[j], out.w_confirm[j]) = fit_linear_quadratic(h_small, y_small, scale);
        double r = 0.0;
        for (std::size_t k = 0; k < offsets.size(); ++k) {
            const double h = offsets[k];
            r = std::max(r, std::abs(y[k] - out.v[j] * h - 0.5 * out.w[j] * h * h));
        }
        out.fit_residual[j] = ymax > 0.0 ? r / ymax : r;
    }
    return out;
}

GapSurface critical_surface(const GapOperator& op, double tc, std::span<const double> offsets,
                            const SolverOptions& opts, int threads) {
    std::vector<double> temps;
    for (double h : offsets) {
        if (!(h > 0.0 && h < tc)) throw DomainError("critical_surface: offsets must lie in (0, tc)");
        temps.push_back(tc - h);
    }
    // Independent cold starts: each slice is close to T_c, where warm starts buy little.
    return op.sweep_temperature(temps, opts, tc, false, threads);
}

CriticalLimits estimate_limits(const GapSurface& surface, const EnergyGrid& grid, double tc) {
    std::vector<double> offsets;
    std::vector<std::vector<double>> squares;
    for (std::size_t i = 0; i < surface.temperatures.size(); ++i) {
        const double h = tc - surface.temperatures[i];
        if (!(h > 0.0)) continue;
        offsets.push_back(h);
        std::vector<double> sq(surface.values[i].size());
        for (std::size_t j = 0; j < sq.size(); ++j) sq[j] = surface.values[i][j] * surface.values[i][j];
        squares.push_back(std::move(sq));
    }
    return fit_limits(grid, tc, offsets, squares);
}

CriticalLimits estimate_limits(const GapOperator& op, double tc, const SolverOptions& opts,
                               std::span<const double> relative_offsets, int threads) {
    const auto offsets = absolute_offsets(tc, relative_offsets);
    const std::size_t m = offsets.size();
    std::vector<GapSolution> slices(m);
    parallel_for(m, threads, [&](std::size_t k) { slices[k] = op.solve_fixed_point(tc - offsets[k], opts); });

    std::vector<std::vector<double>> squares(m);
    for (std::size_t k = 0; k < m; ++k) {
        if (slices[k].phase == Phase::normal)
            throw InvariantViolation("estimate_limits: gap vanishes at T = " + std::to_string(slices[k].T) +
                                     " below tc = " + std::to_string(tc));
        for (double u : slices[k].values) squares[k].push_back(u * u);
    }
    CriticalLimits out = fit_limits(op.grid(), tc, offsets, squares);

    for (std::size_t k = 0; k < m; ++k) {
        const double h = offsets[k];
        const auto du = op.temperature_derivative(slices[k]);
        double q = 0.0, d = 0.0, c3 = 0.0;
        for (std::size_t j = 0; j < op.size(); ++j) {
            const double u = slices[k].values[j];
            const double f = u * u;
            const double df = 2.0 * u * du[j];
            q = std::max(q, std::abs(out.v[j] - f / h));
            d = std::max(d, std::abs(out.v[j] + df));
            c3 = std::max(c3, std::abs(0.5 * out.w[j] + (f + h * df) / (h * h)));
        }
        out.v_quotient_error.push_back(q / tc);
        out.v_derivative_error.push_back(d / tc);
        out.w_error.push_back(c3);
    }
    return out;
}

double simplified_limit_slope(const SimplifiedSolution& s, std::span<const double> relative_offsets) {
    const double tau = s.tau();
    const auto offsets = absolute_offsets(tau, relative_offsets);
    std::vector<double> y;
    for (double h : offsets) {
        const double d = s.delta(tau - h);
        y.push_back(d * d);
    }
    const double scale = *std::max_element(offsets.begin(), offsets.end());
    return fit_linear_quadratic(offsets, y, scale).first;
}

std::vector<double> F_of_x(const Kernel& k, const EnergyGrid& grid, std::span<const double> v, double tc) {
    if (v.size() != grid.size()) throw DomainError("F_of_x: v does not match the grid");
    const auto xi = grid.nodes();
    const auto wq = grid.weights();
    std::vector<double> s(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (v[j] < 0.0) throw DomainError("F_of_x: negative v at node " + std::to_string(j));
        s[j] = wq[j] * std::sqrt(v[j]) * std::tanh(xi[j] / (2.0 * tc)) / xi[j];
    }
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double p = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) p += k(xi[i], xi[j]) * s[j];
        out[i] = p * p;
    }
    return out;
}

std::vector<double> G_of_x(const Kernel& k, const EnergyGrid& grid, std::span<const double> v,
                           std::span<const double> w, double tc) {
    if (v.size() != grid.size() || w.size() != grid.size()) throw DomainError("G_of_x: size mismatch");
    const auto xi = grid.nodes();
    const auto wq = grid.weights();
    std::vector<double> first(grid.size()), second(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (!(v[j] > 0.0)) throw DomainError("G_of_x: v must be positive, node " + std::to_string(j));
        const double e = xi[j];
        const double sv = std::sqrt(v[j]);
        const double t = std::tanh(e / (2.0 * tc));
        const double s = sech2(e / (2.0 * tc));
        first[j] = wq[j] * sv * t / e;
        second[j] = wq[j] * ((w[j] / (e * sv) - 2.0 * sv * v[j] / (e * e * e)) * t +
                             sv * s * (v[j] / (tc * e * e) + 2.0 / (tc * tc)));
    }
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double p = 0.0, q = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double u = k(xi[i], xi[j]);
            p += u * first[j];
            q += u * second[j];
        }
        out[i] = p * q;
    }
    return out;
}

double relative_sup_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DomainError("relative_sup_distance: size mismatch");
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff = std::max(diff, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(b[i]));
    }
    return scale > 0.0 ? diff / scale : diff;
}

double delta_cv_formula(const CriticalLimits& limits, const PhysicalParams& params, double tol) {
    const double tc = limits.tc;
    if (!(tc > 0.0)) throw DomainError("delta_cv_formula: require tc > 0");
    if (std::all_of(limits.v.begin(), limits.v.end(), [](double x) { return x == 0.0; })) return 0.0;
    const double lo = params.epsilon / (2.0 * tc), hi = params.hbar_omega_d / (2.0 * tc);
    const auto r = integrate(
        [&](double eta) {
            const double x = std::clamp(2.0 * tc * eta, limits.grid.lo(), limits.grid.hi());
            const double v = limits.v_at(x);
            return v * v * g_function(eta);
        },
        lo, hi, tol, tol);
    return -params.n0 / (8.0 * tc) * r.value;
}

JumpReport delta_cv(const CriticalLimits& limits, const PhysicalParams& params, std::optional<double> numeric_value,
                    std::optional<double> simplified_value) {
    JumpReport r;
    r.tc = limits.tc;
    r.formula_value = delta_cv_formula(limits, params);
    r.delta_cv = r.formula_value;
    r.psi_second_derivative = -r.formula_value / limits.tc;
    r.numeric_value = numeric_value;
    r.simplified_value = simplified_value;
    return r;
}

double delta_cv_constant_kernel(double fprime_tc, double tc, const PhysicalParams& params) {
    if (!(fprime_tc < 0.0)) throw DomainError("delta_cv_constant_kernel: require f'(T_c) < 0");
    if (!(tc > 0.0)) throw DomainError("delta_cv_constant_kernel: require tc > 0");
    return -params.n0 * fprime_tc * std::tanh(params.hbar_omega_d / (2.0 * tc));
}

}  // namespace gapeq
