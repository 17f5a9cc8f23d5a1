#include "gapeq/gap_solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "gapeq/errors.hpp"
#include "gapeq/parallel.hpp"

namespace gapeq {

namespace {

// sech^2(y) without overflow.
double sech2(double y) {
    const double e = std::exp(-2.0 * std::abs(y));
    return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

// phi(u) = u tanh(E / 2T) / E, E = sqrt(xi^2 + u^2).
double pair_term(double u, double xi, double T) {
    return u * pair_weight(std::sqrt(xi * xi + u * u), T);
}

// d phi / du.
double pair_term_derivative(double u, double xi, double T) {
    const double e = std::sqrt(xi * xi + u * u);
    if (T <= 0.0) return xi * xi / (e * e * e);
    const double y = e / (2.0 * T);
    const double th = std::tanh(y);
    return th / e + (u * u / e) * (sech2(y) / (2.0 * T * e) - th / (e * e));
}

// d phi / dT.
double pair_term_dtemperature(double u, double xi, double T) {
    if (T <= 0.0 || u == 0.0) return 0.0;
    const double e = std::sqrt(xi * xi + u * u);
    return -u * sech2(e / (2.0 * T)) / (2.0 * T * T);
}

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

std::string_view to_string(IterationMethod m) {
    switch (m) {
        case IterationMethod::picard: return "picard";
        case IterationMethod::anderson: return "anderson";
        case IterationMethod::newton: return "newton";
    }
    return "?";
}

std::string_view to_string(Phase p) { return p == Phase::normal ? "normal" : "superconducting"; }

IterationMethod parse_iteration_method(std::string_view name) {
    if (name == "picard") return IterationMethod::picard;
    if (name == "anderson") return IterationMethod::anderson;
    if (name == "newton") return IterationMethod::newton;
    throw ConfigError("unknown iteration method '" + std::string(name) + "'");
}

double GapSolution::sup() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double GapSolution::inf() const {
    return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

GapOperator::GapOperator(Kernel kernel, const PhysicalParams& params, EnergyGrid grid)
    : kernel_(std::move(kernel)),
      params_(params),
      grid_(std::move(grid)),
      lower_(kernel_.u1(), params),
      upper_(kernel_.u2(), params) {
    const double slack = 1e-12 * (params.hbar_omega_d - params.epsilon);
    if (grid_.lo() < params.epsilon - slack || grid_.hi() > params.hbar_omega_d + slack)
        throw ParameterError("energy grid exceeds [epsilon, hbar_omega_d]");
    const std::size_t n = grid_.size();
    const auto x = grid_.nodes();
    const auto w = grid_.weights();
    kw_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) kw_[i * n + j] = kernel_(x[i], x[j]) * w[j];
}

GapOperator::GapOperator(Kernel kernel, const PhysicalParams& params, std::size_t nodes)
    : GapOperator(std::move(kernel), params, EnergyGrid::for_params(params, nodes)) {}

double GapOperator::zero_threshold(const SolverOptions& opts) const {
    return opts.zero_threshold_factor * upper_.delta0();
}

std::vector<double> GapOperator::apply_b(double T, std::span<const double> u) const {
    const std::size_t n = size();
    if (u.size() != n) throw DomainError("apply_b: vector size does not match the grid");
    if (T < 0.0) throw DomainError("apply_b: T must be nonnegative");
    const auto xi = grid_.nodes();
    std::vector<double> phi(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (u[j] < 0.0 || !std::isfinite(u[j])) throw DomainError("apply_b: gap values must be nonnegative");
        phi[j] = pair_term(u[j], xi[j], T);
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = kw_.data() + i * n;
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += row[j] * phi[j];
        out[i] = s;
    }
    return out;
}

double GapOperator::nystrom_value(double T, std::span<const double> u, double x) const {
    if (u.size() != size()) throw DomainError("nystrom_value: vector size does not match the grid");
    const auto xi = grid_.nodes();
    const auto w = grid_.weights();
    double s = 0.0;
    for (std::size_t j = 0; j < size(); ++j) s += kernel_(x, xi[j]) * w[j] * pair_term(u[j], xi[j], T);
    return s;
}

GapSolution GapOperator::solve_fixed_point(double T, const SolverOptions& opts,
                                           std::span<const double> initial) const {
    if (T < 0.0) throw DomainError("solve_fixed_point: T must be nonnegative");
    const std::size_t n = size();
    GapSolution sol;
    sol.T = T;
    if (T >= upper_.tau()) {
        sol.values.assign(n, 0.0);
        sol.phase = Phase::normal;
        return sol;
    }

    std::vector<double> u;
    if (initial.empty()) {
        u = constant_vector(upper_.delta(T));
    } else {
        if (initial.size() != n) throw DomainError("solve_fixed_point: initial guess size mismatch");
        u.assign(initial.begin(), initial.end());
        for (double& v : u) v = std::max(v, 0.0);
    }

    const auto xi = grid_.nodes();
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> kw(
        kw_.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

    auto residual_of = [&](const std::vector<double>& v, std::vector<double>& r) {
        r = apply_b(T, v);
        for (std::size_t i = 0; i < n; ++i) r[i] -= v[i];
        return sup_norm(r);
    };

    std::vector<double> r;
    double res = residual_of(u, r);
    sol.residual_history.push_back(res);

    double lambda = opts.damping;
    double last_step = std::numeric_limits<double>::infinity();
    double prev_step = std::numeric_limits<double>::infinity();
    std::deque<std::vector<double>> du_hist, dr_hist;
    std::vector<double> u_prev, r_prev;
    bool converged = false;

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        const bool warmup = iter <= opts.picard_warmup;
        const IterationMethod method = warmup ? IterationMethod::picard : opts.method;

        if (res <= opts.tol) {
            if (method != IterationMethod::newton) { converged = true; break; }
            // Near T_c the residual understates the error by the (small) spectral gap of
            // I - B'(u); Newton also has to stop moving.
            if (last_step <= opts.tol || (std::isfinite(prev_step) && last_step >= prev_step)) {
                converged = true;
                break;
            }
        }

        std::vector<double> next(n);
        if (method == IterationMethod::picard) {
            for (std::size_t i = 0; i < n; ++i) next[i] = std::max(u[i] + lambda * r[i], 0.0);
        } else if (method == IterationMethod::anderson) {
            if (!u_prev.empty()) {
                std::vector<double> du(n), dr(n);
                for (std::size_t i = 0; i < n; ++i) {
                    du[i] = u[i] - u_prev[i];
                    dr[i] = r[i] - r_prev[i];
                }
                du_hist.push_back(std::move(du));
                dr_hist.push_back(std::move(dr));
                if (du_hist.size() > opts.anderson_depth) {
                    du_hist.pop_front();
                    dr_hist.pop_front();
                }
            }
            const auto m = static_cast<Eigen::Index>(dr_hist.size());
            Eigen::VectorXd gamma = Eigen::VectorXd::Zero(m);
            if (m > 0) {
                Eigen::MatrixXd df(static_cast<Eigen::Index>(n), m);
                for (Eigen::Index c = 0; c < m; ++c)
                    for (std::size_t i = 0; i < n; ++i) df(static_cast<Eigen::Index>(i), c) = dr_hist[c][i];
                const Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(n));
                gamma = df.colPivHouseholderQr().solve(rv);
            }
            for (std::size_t i = 0; i < n; ++i) {
                double v = u[i] + lambda * r[i];
                for (Eigen::Index c = 0; c < m; ++c) v -= (du_hist[c][i] + lambda * dr_hist[c][i]) * gamma(c);
                next[i] = std::max(v, 0.0);
            }
            u_prev = u;
            r_prev = r;
        } else {
            Eigen::VectorXd d(static_cast<Eigen::Index>(n));
            for (std::size_t j = 0; j < n; ++j) d(static_cast<Eigen::Index>(j)) = pair_term_derivative(u[j], xi[j], T);
            Eigen::MatrixXd a = -(kw * d.asDiagonal());
            a.diagonal().array() += 1.0;
            const Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(n));
            const Eigen::VectorXd delta = a.partialPivLu().solve(rv);
            // Backtracking on the sup-norm residual.
            double alpha = 1.0;
            std::vector<double> trial_r;
            for (int ls = 0; ls < 30; ++ls) {
                for (std::size_t i = 0; i < n; ++i)
                    next[i] = std::max(u[i] + alpha * delta(static_cast<Eigen::Index>(i)), 0.0);
                const double trial = residual_of(next, trial_r);
                if (trial < res || trial <= opts.tol || alpha < 1e-6) break;
                alpha *= 0.5;
            }
        }

        prev_step = last_step;
        last_step = sup_distance(next, u);
        u = std::move(next);
        const double new_res = residual_of(u, r);
        if (method == IterationMethod::picard && new_res > res && !warmup) {
            sol.damping_engaged = true;
            lambda = std::max(lambda * 0.5, 1.0 / 1024.0);
        }
        res = new_res;
        sol.residual_history.push_back(res);
        sol.iterations = iter;
    }

    if (!converged) {
        if (res <= opts.tol && opts.method == IterationMethod::newton) {
            converged = true;  // residual met; step criterion still shrinking at max_iter
        } else {
            std::ostringstream os;
            os << "fixed-point iteration did not converge at T = " << T << " after " << opts.max_iter
               << " iterations (residual " << res << ")";
            throw NonConvergenceError(os.str(), sol.residual_history);
        }
    }

    sol.residual = res;
    sol.values = std::move(u);
    sol.phase = sol.sup() < zero_threshold(opts) ? Phase::normal : Phase::superconducting;
    audit_zero_propagation(sol, opts);
    if (sol.phase == Phase::normal) std::fill(sol.values.begin(), sol.values.end(), 0.0);
    return sol;
}

void GapOperator::audit_zero_propagation(const GapSolution& sol, const SolverOptions& opts) const {
    const double thr = zero_threshold(opts);
    if (sol.inf() < thr && sol.sup() > 10.0 * thr) {
        std::ostringstream os;
        os << "mixed zero/positive gap profile at T = " << sol.T << " (min " << sol.inf() << ", max "
           << sol.sup() << ")";
        throw InvariantViolation(os.str());
    }
}

std::vector<double> GapOperator::temperature_derivative(const GapSolution& sol) const {
    const std::size_t n = size();
    std::vector<double> out(n, 0.0);
    if (sol.phase == Phase::normal || sol.T <= 0.0) return out;
    const auto xi = grid_.nodes();
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> kw(
        kw_.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::VectorXd d(static_cast<Eigen::Index>(n)), dt(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        d(static_cast<Eigen::Index>(j)) = pair_term_derivative(sol.values[j], xi[j], sol.T);
        dt(static_cast<Eigen::Index>(j)) = pair_term_dtemperature(sol.values[j], xi[j], sol.T);
    }
    Eigen::MatrixXd a = -(kw * d.asDiagonal());
    a.diagonal().array() += 1.0;
    const Eigen::VectorXd rhs = kw * dt;
    const Eigen::VectorXd du = a.partialPivLu().solve(rhs);
    for (std::size_t i = 0; i < n; ++i) out[i] = du(static_cast<Eigen::Index>(i));
    return out;
}

std::vector<double> GapOperator::lower_start(double T) const {
    const double d1 = lower_.delta(T);
    if (d1 > 0.0) return constant_vector(d1);  // Delta_1(T) is a subsolution below tau_1

    // Above tau_1 use the Perron vector phi of the linearization at u = 0 and the largest
    // amplitude s with B(s phi) >= s phi. Starting from a small multiple instead would let
    // Newton fall onto the trivial fixed point.
    const std::size_t n = size();
    const auto xi = grid_.nodes();
    std::vector<double> phi(n, 1.0), next(n);
    for (int it = 0; it < 500; ++it) {
        double top = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += kw_[i * n + j] * pair_weight(xi[j], T) * phi[j];
            next[i] = s;
            top = std::max(top, s);
        }
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] /= top;
            change = std::max(change, std::abs(next[i] - phi[i]));
        }
        phi.swap(next);
        if (change < 1e-14) break;
    }
    auto scaled = [&](double s) {
        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = s * phi[i];
        return u;
    };
    auto is_sub = [&](double s) {
        const auto u = scaled(s);
        const auto bu = apply_b(T, u);
        for (std::size_t i = 0; i < n; ++i)
            if (bu[i] < u[i]) return false;
        return true;
    };
    double hi = upper_.delta(T), lo = 0.5 * hi;
    while (lo > 1e-12 * upper_.delta0() && !is_sub(lo)) {
        hi = lo;
        lo *= 0.5;
    }
    if (!is_sub(lo)) return constant_vector(1e-3 * upper_.delta(T));
    // Push towards the largest such amplitude: a small one sits on the side of the
    // residual hump from which Newton heads for zero.
    for (int it = 0; it < 40 && hi - lo > 1e-6 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (is_sub(mid) ? lo : hi) = mid;
    }
    return scaled(lo);
}

UniquenessReport GapOperator::uniqueness_probe(double T, const SolverOptions& opts) const {
    if (!(T < upper_.tau())) throw DomainError("uniqueness_probe: require T < tau_2");
    UniquenessReport rep;
    rep.from_upper = solve_fixed_point(T, opts);
    // Plain iterations from a subsolution increase monotonically; a few of them first.
    SolverOptions lower_opts = opts;
    lower_opts.picard_warmup = std::max(opts.picard_warmup, 20);
    lower_opts.max_iter = opts.max_iter + lower_opts.picard_warmup;
    rep.from_lower = solve_fixed_point(T, lower_opts, lower_start(T));
    rep.gap = sup_distance(rep.from_upper.values, rep.from_lower.values);
    rep.agree = rep.gap <= 10.0 * opts.tol && rep.from_upper.phase == rep.from_lower.phase;
    return rep;
}

double GapOperator::lipschitz_ratio(double T, std::span<const double> u, std::span<const double> v) const {
    const double denom = sup_distance(u, v);
    if (denom == 0.0) throw DomainError("lipschitz_ratio: u == v, ratio undefined");
    const auto bu = apply_b(T, u);
    const auto bv = apply_b(T, v);
    return sup_distance(bu, bv) / denom;
}

double GapOperator::lipschitz_bound() const {
    return 3.0 * kernel_.u2() * std::log(params_.hbar_omega_d / params_.epsilon);
}

TcResult GapOperator::critical_temperature(double tol, const SolverOptions& opts) const {
    if (!(tol > 0.0)) throw DomainError("critical_temperature: tol must be positive");
    TcResult out;
    auto is_normal = [&](double T) {
        const Phase p = solve_fixed_point(T, opts).phase;
        out.history.emplace_back(T, p);
        return p == Phase::normal;
    };

    // The discrete T_c may sit a hair outside [tau_1, tau_2]; widen slightly.
    double lo = lower_.tau() * (1.0 - 1e-6);
    double hi = upper_.tau() * (1.0 + 1e-6);
    const bool lo_normal = is_normal(lo);
    const bool hi_normal = is_normal(hi);
    if (lo_normal || !hi_normal) {
        std::ostringstream os;
        os << "T_c bracket check failed: phase(" << lo << ") = " << (lo_normal ? "normal" : "superconducting")
           << ", phase(" << hi << ") = " << (hi_normal ? "normal" : "superconducting");
        throw InvariantViolation(os.str());
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (is_normal(mid) ? hi : lo) = mid;
    }
    out.lo = lo;
    out.hi = hi;
    out.tc = 0.5 * (lo + hi);
    return out;
}

GapSurface GapOperator::sweep_temperature(std::span<const double> temperatures, const SolverOptions& opts,
                                          double tc, bool warm_start, int threads) const {
    for (std::size_t i = 0; i < temperatures.size(); ++i) {
        if (temperatures[i] < 0.0) throw DomainError("sweep_temperature: temperatures must be nonnegative");
        if (i > 0 && !(temperatures[i] > temperatures[i - 1]))
            throw DomainError("sweep_temperature: temperatures must be increasing");
    }
    GapSurface s;
    s.temperatures.assign(temperatures.begin(), temperatures.end());
    s.tc = tc >= 0.0 ? tc : critical_temperature(1e-12 * upper_.tau(), opts).tc;
    const std::size_t m = temperatures.size();
    s.values.assign(m, std::vector<double>(size(), 0.0));
    s.iterations.assign(m, 0);
    s.residuals.assign(m, 0.0);

    auto solve_slice = [&](std::size_t i, std::span<const double> start) {
        const double T = temperatures[i];
        if (T >= s.tc) return;
        try {
            GapSolution sol;
            if (start.empty()) {
                sol = solve_fixed_point(T, opts);
            } else {
                const double d1 = lower_.delta(T), d2 = upper_.delta(T);
                std::vector<double> clamped(start.begin(), start.end());
                for (double& v : clamped) v = std::clamp(v, d1, d2);
                sol = solve_fixed_point(T, opts, clamped);
            }
            s.values[i] = std::move(sol.values);
            s.iterations[i] = sol.iterations;
            s.residuals[i] = sol.residual;
        } catch (const NonConvergenceError& e) {
            std::ostringstream os;
            os << "sweep slice T = " << T << ": " << e.what();
            throw NonConvergenceError(os.str(), e.residual_history());
        }
    };

    if (warm_start) {
        for (std::size_t i = 0; i < m; ++i) {
            const bool have_prev = i > 0 && temperatures[i - 1] < s.tc;
            solve_slice(i, have_prev ? std::span<const double>(s.values[i - 1]) : std::span<const double>{});
        }
    } else {
        parallel_for(m, threads, [&](std::size_t i) { solve_slice(i, {}); });
    }

    for (std::size_t i = 0; i < m; ++i) {
        const double T = temperatures[i];
        s.closeness = std::max(s.closeness, upper_.delta(T) - lower_.delta(T));
    }
    return s;
}

double GapOperator::sandwich_excess(const GapSolution& sol) const {
    const double d1 = lower_.delta(sol.T), d2 = upper_.delta(sol.T);
    double excess = 0.0;
    for (double v : sol.values) excess = std::max({excess, v - d2, d1 - v});
    return excess;
}

}  // namespace gapeq
