#include "gapeq/thermo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>

#include "gapeq/differencing.hpp"
#include "gapeq/errors.hpp"
#include "gapeq/parallel.hpp"
#include "gapeq/quadrature.hpp"

namespace gapeq {

namespace {

void require_positive_temperature(double T, const char* who) {
    if (!(T > 0.0)) throw DomainError(std::string(who) + ": require T > 0, got " + std::to_string(T));
}

}  // namespace

double omega_n(double T, const PhysicalParams& params, const DensityOfStates& dos, double tol) {
    require_positive_temperature(T, "omega_n");
    const double eps = params.epsilon, hw = params.hbar_omega_d, n0 = params.n0;
    const double kinetic = -n0 * (hw * hw - eps * eps);
    const double fermi =
        integrate([&](double x) { return log1p_exp_neg(x / T); }, eps, hw, tol, tol).value;
    return kinetic - 4.0 * n0 * T * fermi + phi(T, params, dos, tol);
}

double phi(double T, const PhysicalParams& params, const DensityOfStates& dos, double tol) {
    require_positive_temperature(T, "phi");
    if (dos.is_zero()) return 0.0;
    const double mu = params.mu, hw = params.hbar_omega_d;
    // Below the shell: x in [-mu, -hw], where ln(1 + e^{x/T}) = ln(1 + e^{-|x|/T}).
    const double filled = integrate([&](double x) { return x * dos(x); }, -mu, -hw, tol, tol).value;
    const double holes =
        integrate([&](double x) { return dos(x) * log1p_exp_neg(-x / T); }, -mu, -hw, tol, tol).value;
    const double tail = integrate_fermi_tail(dos, hw, T, tol).value;
    return 2.0 * filled - 2.0 * T * holes - 2.0 * T * tail;
}

double psi(double T, const PhysicalParams& params, const EnergyGrid& grid, std::span<const double> u) {
    require_positive_temperature(T, "psi");
    if (u.size() != grid.size()) throw DomainError("psi: slice does not match the grid");
    const auto x = grid.nodes();
    std::vector<double> integrand(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double u2 = u[j] * u[j];
        if (u2 == 0.0) {
            integrand[j] = 0.0;
            continue;
        }
        const double e = std::sqrt(x[j] * x[j] + u2);
        const double e_minus_x = u2 / (e + x[j]);
        // ln[(1 + e^{-E/T}) / (1 + e^{-x/T})] written so that E -> x loses nothing.
        const double ex = std::exp(-x[j] / T);
        const double log_ratio = std::log1p(ex * std::expm1(-e_minus_x / T) / (1.0 + ex));
        integrand[j] = -2.0 * e_minus_x + u2 * std::tanh(e / (2.0 * T)) / e - 4.0 * T * log_ratio;
    }
    return params.n0 * grid.integrate(integrand);
}

ThermoModel::ThermoModel(const GapOperator& op, DensityOfStates dos, double tc, SolverOptions opts)
    : op_(op), dos_(std::move(dos)), tc_(tc), opts_(opts) {
    if (!(tc > 0.0)) throw DomainError("ThermoModel: require tc > 0");
}

double ThermoModel::omega_n(double T) const { return gapeq::omega_n(T, op_.params(), dos_); }

double ThermoModel::psi(double T) const {
    require_positive_temperature(T, "ThermoModel::psi");
    if (T >= tc_) return 0.0;
    const GapSolution sol = op_.solve_fixed_point(T, opts_);
    return gapeq::psi(T, op_.params(), op_.grid(), sol.values);
}

double ThermoModel::omega(double T) const { return omega_n(T) + psi(T); }

std::string_view to_string(Side s) {
    switch (s) {
        case Side::below: return "below";
        case Side::above: return "above";
        case Side::tc_minus: return "tc_minus";
        case Side::tc_plus: return "tc_plus";
    }
    return "?";
}

namespace {

// A stencil is a set of integer offsets k (points x0 + k * step) around an anchor.
struct Stencil {
    double anchor;
    double step;
    std::vector<int> offsets;
    int order_value, order_first, order_second;  // leading error powers of h
};

struct Estimate {
    double value, first, second;
};

class Sampler {
public:
    std::size_t request(double t) {
        auto [it, inserted] = index_.try_emplace(t, temps_.size());
        if (inserted) temps_.push_back(t);
        return it->second;
    }
    void evaluate(const std::function<double(double)>& f, int threads) {
        values_.assign(temps_.size(), 0.0);
        parallel_for(temps_.size(), threads, [&](std::size_t i) { values_[i] = f(temps_[i]); });
    }
    double at(double t) const { return values_[index_.at(t)]; }

private:
    std::map<double, std::size_t> index_;
    std::vector<double> temps_, values_;
};

double point(const Stencil& s, int k) { return s.anchor + k * s.step; }

Estimate apply(const Stencil& s, const Sampler& sampler) {
    std::vector<double> xs(s.offsets.size()), fs(s.offsets.size());
    for (std::size_t i = 0; i < s.offsets.size(); ++i) {
        // Work in offset units for well-conditioned weights.
        xs[i] = s.offsets[i];
        fs[i] = sampler.at(point(s, s.offsets[i]));
    }
    Estimate e{0.0, 0.0, 0.0};
    const auto w0 = fd_weights(0.0, xs, 0);
    const auto w1 = fd_weights(0.0, xs, 1);
    const auto w2 = fd_weights(0.0, xs, 2);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        e.value += w0[i] * fs[i];
        e.first += w1[i] * fs[i];
        e.second += w2[i] * fs[i];
    }
    e.first /= s.step;
    e.second /= s.step * s.step;
    return e;
}

Stencil scaled(Stencil s, double factor) {
    s.step *= factor;
    return s;
}

ThermoPoint combine(const Stencil& fine, const Sampler& sampler, bool richardson, Side side) {
    Estimate e = apply(fine, sampler);
    if (richardson) {
        const Estimate c = apply(scaled(fine, 2.0), sampler);
        e.value = gapeq::richardson(e.value, c.value, fine.order_value);
        e.first = gapeq::richardson(e.first, c.first, fine.order_first);
        e.second = gapeq::richardson(e.second, c.second, fine.order_second);
    }
    ThermoPoint p;
    p.T = fine.anchor;
    p.omega = e.value;
    p.entropy = -e.first;
    p.cv = -fine.anchor * e.second;
    p.side = side;
    return p;
}

}  // namespace

ThermoCurve entropy_and_cv(const std::function<double(double)>& omega, std::span<const double> temperatures,
                           double tc, double h, bool richardson, int threads) {
    if (!(h > 0.0)) throw DomainError("entropy_and_cv: require h > 0");
    if (!(tc > 0.0)) throw DomainError("entropy_and_cv: require tc > 0");
    const int reach = richardson ? 2 : 1;  // coarse stencils use step 2h

    std::vector<Stencil> stencils;
    std::vector<Side> sides;
    for (double T : temperatures) {
        if (T > tc - h && T < tc + h)
            throw StencilError("entropy_and_cv: sample T = " + std::to_string(T) +
                               " lies within one step of tc = " + std::to_string(tc));
        const Side side = T < tc ? Side::below : Side::above;
        const bool crosses = side == Side::below ? T + reach * h > tc : T - reach * h < tc;
        Stencil s{T, h, {}, 0, 0, 0};
        if (!crosses) {
            s.offsets = {-1, 0, 1};
            s.order_value = 2;  // unused: the anchor value is exact
            s.order_first = 2;
            s.order_second = 2;
        } else if (side == Side::below) {
            s.offsets = {-3, -2, -1, 0};
            s.order_value = 4;
            s.order_first = 3;
            s.order_second = 2;
        } else {
            s.offsets = {0, 1, 2, 3};
            s.order_value = 4;
            s.order_first = 3;
            s.order_second = 2;
        }
        const int lowest = *std::min_element(s.offsets.begin(), s.offsets.end());
        if (T + reach * lowest * h <= 0.0)
            throw StencilError("entropy_and_cv: stencil at T = " + std::to_string(T) + " reaches T <= 0");
        stencils.push_back(std::move(s));
        sides.push_back(side);
    }

    // One-sided limits at tc from points strictly on each side.
    Stencil minus{tc, h, {-4, -3, -2, -1}, 4, 3, 2};
    Stencil plus{tc, h, {1, 2, 3, 4}, 4, 3, 2};
    if (tc - reach * 4 * h <= 0.0) throw StencilError("entropy_and_cv: step too large for tc");

    Sampler sampler;
    auto request_all = [&](const Stencil& s) {
        for (int r = 1; r <= reach; ++r)
            for (int k : s.offsets) sampler.request(s.anchor + k * (s.step * r));
    };
    for (const auto& s : stencils) request_all(s);
    request_all(minus);
    request_all(plus);
    sampler.evaluate(omega, threads);

    ThermoCurve curve;
    curve.tc = tc;
    curve.step = h;
    curve.points.reserve(stencils.size());
    for (std::size_t i = 0; i < stencils.size(); ++i) {
        ThermoPoint p = combine(stencils[i], sampler, richardson, sides[i]);
        p.omega = sampler.at(stencils[i].anchor);
        curve.points.push_back(p);
    }
    curve.tc_minus = combine(minus, sampler, richardson, Side::tc_minus);
    curve.tc_plus = combine(plus, sampler, richardson, Side::tc_plus);
    return curve;
}

}  // namespace gapeq
