#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <random>
#include <sstream>

#include "analysis.hpp"
#include "gapeq/critical.hpp"
#include "gapeq/errors.hpp"
#include "gapeq/parallel.hpp"
#include "gapeq/simplified_gap.hpp"

namespace gapeq::cli {

bool AcceptanceReport::all_pass() const {
    for (const auto& r : results)
        if (!r.pass) return false;
    return !results.empty();
}

std::string format_line(const CriterionResult& r) {
    char head[128];
    std::snprintf(head, sizeof head, "%s  %2d  %-34s (%.2f s)  ", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(),
                  r.seconds);
    return head + r.detail;
}

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return out;
}

PhysicalParams reference_params() {
    PhysicalParams p;
    p.epsilon = 0.01;
    p.hbar_omega_d = 1.0;
    p.mu = 10.0;
    p.n0 = 1.0;
    return p;
}

// Smooth, non-separable reference table: 0.4 + 0.1 exp(-2 (x - xi)^2) (x + xi) / 2.
BicubicSpline reference_table(const PhysicalParams& p) {
    std::vector<double> grid = linspace(p.epsilon, p.hbar_omega_d, 41);
    return BicubicSpline::sample(
        [](double x, double xi) { return 0.4 + 0.1 * std::exp(-2.0 * (x - xi) * (x - xi)) * 0.5 * (x + xi); }, grid,
        grid);
}

Kernel bounded(Kernel::Form form, const PhysicalParams& p) {
    const auto [lo, hi] = sample_kernel_range(form, p);
    return Kernel(std::move(form), lo, hi, p);
}

struct Case {
    std::string name;
    std::unique_ptr<GapOperator> op;
};

class Suite {
public:
    explicit Suite(const RunConfig& cfg) : cfg_(cfg) {
        settings_.solver = cfg.solver;
        settings_.tc_tol = cfg.tol.tc;
        settings_.step_fraction = cfg.thermo.step_fraction;
        settings_.richardson = cfg.thermo.richardson;
        settings_.threads = cfg.threads;
        dos_ = build_dos(cfg);

        const PhysicalParams p = reference_params();
        add("constant U=0.5", Kernel::constant(0.5, p), p, cfg.nodes);
        add("separable 0.4+0.1*x*xi", bounded(SeparableCoupling{0.4, {0.1}}, p), p, cfg.nodes);
        add("tabulated", bounded(reference_table(p), p), p, cfg.nodes);
        add("config", build_kernel(cfg), cfg.params, cfg.nodes);

        PhysicalParams weak = p;
        weak.epsilon = 1e-6;
        weak_ = std::make_unique<GapOperator>(Kernel::constant(0.25, weak), weak, cfg.nodes);
        strong_ = std::make_unique<GapOperator>(Kernel::constant(0.5, weak), weak, cfg.nodes);
    }

    const std::vector<Case>& cases() const { return cases_; }
    const Case& find(const std::string& name) const {
        for (const auto& c : cases_)
            if (c.name == name) return c;
        throw std::logic_error("no case " + name);
    }
    const GapOperator& weak() const { return *weak_; }
    const RunConfig& cfg() const { return cfg_; }
    const JumpSettings& settings() const { return settings_; }

    const TcResult& tc(const GapOperator& op) {
        auto it = tc_.find(&op);
        if (it == tc_.end()) it = tc_.emplace(&op, locate_tc(op, settings_)).first;
        return it->second;
    }

    const JumpAnalysis& jump(const GapOperator& op) {
        auto it = jump_.find(&op);
        if (it == jump_.end()) it = jump_.emplace(&op, analyze_jump(op, dos_, settings_)).first;
        return it->second;
    }

    /// Operators the thermodynamic criteria run on: the weak-coupling reference first.
    std::vector<std::pair<std::string, const GapOperator*>> jump_cases() const {
        std::vector<std::pair<std::string, const GapOperator*>> out{{"constant U=0.25 eps=1e-6", weak_.get()},
                                                                    {"constant U=0.5 eps=1e-6", strong_.get()}};
        for (const auto& c : cases_) out.emplace_back(c.name, c.op.get());
        return out;
    }

    const DensityOfStates& dos() const { return dos_; }

private:
    void add(std::string name, Kernel k, const PhysicalParams& p, std::size_t nodes) {
        cases_.push_back({std::move(name), std::make_unique<GapOperator>(std::move(k), p, nodes)});
    }

    const RunConfig& cfg_;
    JumpSettings settings_;
    DensityOfStates dos_;
    std::vector<Case> cases_;
    std::unique_ptr<GapOperator> weak_, strong_;
    std::map<const GapOperator*, TcResult> tc_;
    std::map<const GapOperator*, JumpAnalysis> jump_;
};

using Check = std::function<bool(Suite&, std::ostringstream& detail)>;

bool closed_form(Suite&, std::ostringstream& d) {
    const PhysicalParams p = reference_params();
    const double delta = delta0_closed_form(0.5, p);
    const double rhs = simplified_rhs(0.5, 0.0, delta, p);
    d << "Delta(0) = " << std::setprecision(9) << delta << ", rhs - 1 = " << sci(rhs - 1.0);
    return std::abs(delta - 0.265159) <= 1e-6 && std::abs(rhs - 1.0) <= 1e-8;
}

bool sandwich(Suite& s, std::ostringstream& d) {
    bool ok = true;
    for (const char* name : {"constant U=0.5", "separable 0.4+0.1*x*xi", "tabulated"}) {
        const GapOperator& op = *s.find(name).op;
        const auto temps = linspace(0.0, op.upper().tau(), 20);
        std::vector<double> excess(temps.size());
        parallel_for(temps.size(), s.cfg().threads, [&](std::size_t i) {
            const GapSolution sol = op.solve_fixed_point(temps[i], s.settings().solver);
            const double lo = op.lower().delta(temps[i]), hi = op.upper().delta(temps[i]);
            double e = 0.0;
            for (double u : sol.values) e = std::max({e, u - hi, lo - u});
            excess[i] = e;
        });
        const double worst = *std::max_element(excess.begin(), excess.end());
        d << name << ": max excess " << sci(worst) << "; ";
        ok = ok && worst <= 1e-7;
    }
    return ok;
}

bool constant_collapse(Suite& s, std::ostringstream& d) {
    const GapOperator& op = *s.find("constant U=0.5").op;
    const double tau1 = op.lower().tau();
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const double T = tau1 * i / 10.0;
        const GapSolution sol = op.solve_fixed_point(T, s.settings().solver);
        const double exact = solve_simplified(0.5, T, op.params());
        for (double u : sol.values) worst = std::max(worst, std::abs(u - exact));
    }
    const double tc = s.tc(op).tc;
    const double rel = std::abs(tc - tau1) / tau1;
    d << "sup |u - Delta_1| = " << sci(worst) << ", |T_c - tau_1| / tau_1 = " << sci(rel);
    return worst <= 1e-8 && rel <= 1e-8;
}

bool tc_bracket(Suite& s, std::ostringstream& d) {
    bool ok = true;
    for (const auto& c : s.cases()) {
        const TcResult& r = s.tc(*c.op);
        const double slack = r.hi - r.lo;
        const double t1 = c.op->lower().tau(), t2 = c.op->upper().tau();
        const bool in = t1 - slack <= r.tc && r.tc <= t2 + slack;
        d << c.name << ": " << std::setprecision(8) << t1 << " <= " << r.tc << " <= " << t2 << "; ";
        ok = ok && in;
    }
    return ok;
}

bool lipschitz(Suite& s, std::ostringstream& d) {
    bool ok = true;
    for (const auto& c : s.cases()) {
        const GapOperator& op = *c.op;
        std::mt19937_64 rng(20240611);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst = 0.0;
        for (int pair = 0; pair < 100; ++pair) {
            const double T = unit(rng) * 0.99 * op.upper().tau();
            // V_T = [Delta_1, Delta_2]; for a constant kernel it is a single point, and the
            // pairs come from [0, Delta_2] where the same estimate holds.
            double lo = op.lower().delta(T);
            const double hi = op.upper().delta(T);
            if (hi - lo <= 1e-12 * hi) lo = 0.0;
            std::vector<double> u(op.size()), v(op.size());
            for (std::size_t j = 0; j < op.size(); ++j) {
                u[j] = lo + (hi - lo) * unit(rng);
                v[j] = lo + (hi - lo) * unit(rng);
            }
            worst = std::max(worst, op.lipschitz_ratio(T, u, v));
        }
        const double bound = op.lipschitz_bound();
        d << c.name << ": " << sci(worst) << " <= " << sci(bound) << "; ";
        ok = ok && worst <= bound;
    }
    return ok;
}

bool weak_coupling(Suite& s, std::ostringstream& d) {
    const GapOperator& op = s.weak();
    const double ratio = op.lower().delta0() / op.lower().tau();
    const JumpAnalysis& a = s.jump(op);
    const double tc = a.tc.tc;
    double v_lo = INFINITY, v_hi = -INFINITY;
    for (double v : a.limits.v) {
        v_lo = std::min(v_lo, v / tc);
        v_hi = std::max(v_hi, v / tc);
    }
    const double jump = a.report.delta_cv / (op.params().n0 * tc);
    d << std::setprecision(6) << "Delta(0)/tau = " << ratio << ", v/T_c in [" << v_lo << ", " << v_hi
      << "], dC_V/(N0 T_c) = " << jump;
    const bool r1 = std::abs(ratio - 1.764) <= 0.01 * 1.764;
    const bool r2 = std::abs(v_lo - 9.384) <= 0.01 * 9.384 && std::abs(v_hi - 9.384) <= 0.01 * 9.384;
    const bool r3 = std::abs(jump - 9.384) <= 0.02 * 9.384;
    return r1 && r2 && r3;
}

bool jump_consistency(Suite& s, std::ostringstream& d) {
    bool ok = true;
    for (const auto& [name, op] : s.jump_cases()) {
        const JumpAnalysis& a = s.jump(*op);
        const JumpReport& r = a.report;
        const double numeric = *r.numeric_value;
        const double rel = std::abs(r.formula_value - numeric) / std::abs(numeric);
        bool case_ok = r.formula_value > 0.0 && numeric > 0.0 && r.psi_second_derivative < 0.0 &&
                       rel <= s.cfg().tol.jump;
        d << name << ": formula " << sci(r.formula_value) << " vs stencil " << sci(numeric) << " (" << sci(rel) << ")";
        if (r.simplified_value) {
            // The simplified-equation jump is the eps -> 0 form; with a finite cutoff the two
            // differ by -eps / (2 T_c) at leading order, so it is compared where that is small.
            const double rs = std::abs(r.formula_value - *r.simplified_value) / *r.simplified_value;
            const double cutoff = op->params().epsilon / (2.0 * r.tc);
            d << ", vs simplified " << sci(*r.simplified_value) << " (" << sci(rs) << ")";
            if (cutoff <= 1e-3) {
                case_ok = case_ok && rs <= 0.02 && *r.simplified_value > 0.0;
            } else {
                d << " [not compared: eps/2T_c = " << sci(cutoff) << "]";
            }
        }
        d << "; ";
        ok = ok && case_ok;
    }
    return ok;
}

bool smoothness(Suite& s, std::ostringstream& d) {
    bool ok = true;
    for (const auto& [name, op] : s.jump_cases()) {
        const JumpAnalysis& a = s.jump(*op);
        const ThermoPoint& m = a.curve.tc_minus;
        const ThermoPoint& p = a.curve.tc_plus;
        const double om = std::abs(m.omega - p.omega) / std::abs(p.omega);
        const double en = std::abs(m.entropy - p.entropy) / std::abs(p.entropy);

        const double tc = a.tc.tc;
        const ThermoModel model(*op, s.dos(), tc, s.settings().solver);
        double prev = INFINITY;
        bool decreasing = true;
        std::string quotients;
        for (double f : {1e-2, 1e-3, 1e-4}) {
            const double h = f * tc;
            const double q = model.psi(tc - h) / h;
            decreasing = decreasing && q < 0.0 && std::abs(q) < prev;
            prev = std::abs(q);
            quotients += sci(q) + " ";
        }
        d << name << ": dOmega " << sci(om) << ", dS " << sci(en) << ", Psi/(T_c-T) " << quotients << "; ";
        ok = ok && om <= 1e-8 && en <= 1e-5 && decreasing;
    }
    return ok;
}

bool g_suite(Suite&, std::ostringstream& d) {
    const double g0 = g_function(0.0);
    const double g1 = g_function(1.0);
    bool negative = true;
    for (int k = 0; k <= 120; ++k) {
        const double eta = std::pow(10.0, -6.0 + 9.0 * k / 120.0);
        negative = negative && g_function(eta) < 0.0;
    }
    const double branch = std::abs(g_taylor(1e-2) - g_direct(1e-2));
    d << std::setprecision(9) << "g(0) = " << g0 << ", g(1) = " << g1 << ", branch gap " << sci(branch);
    return g0 == -2.0 / 3.0 && std::abs(g1 + 0.341620) <= 1e-6 && negative && branch <= 1e-10;
}

bool zero_propagation(Suite& s, std::ostringstream& d) {
    bool ok = true;
    const double tol = s.settings().solver.tol;
    for (const auto& c : s.cases()) {
        const GapOperator& op = *c.op;
        const double tc = s.tc(op).tc;
        int mixed = 0;
        try {
            const GapSurface surf =
                op.sweep_temperature(linspace(0.0, 1.2 * op.upper().tau(), 25), s.settings().solver, tc, true,
                                     s.cfg().threads);
            for (const auto& slice : surf.values) {
                const auto [lo, hi] = std::minmax_element(slice.begin(), slice.end());
                if (*lo == 0.0 && *hi > 0.0) ++mixed;
            }
        } catch (const InvariantViolation& e) {
            d << c.name << ": " << e.what() << "; ";
            ok = false;
            continue;
        }
        double worst = 0.0;
        std::vector<double> probes;
        for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) probes.push_back(f * op.lower().tau());
        // Between tau_1 and T_c the lower start is no longer Delta_1.
        if (tc > op.lower().tau())
            for (double f : {0.5, 0.9}) probes.push_back(op.lower().tau() + f * (tc - op.lower().tau()));
        for (double T : probes) {
            const UniquenessReport r = op.uniqueness_probe(T, s.settings().solver);
            worst = std::max(worst, r.agree ? r.gap : INFINITY);
        }
        d << c.name << ": mixed " << mixed << ", probe gap " << sci(worst) << "; ";
        ok = ok && mixed == 0 && worst <= 10.0 * tol;
    }
    return ok;
}

bool fg_consistency(Suite& s, std::ostringstream& d) {
    bool ok = true;
    const auto& opts = s.settings().solver;
    for (const auto& c : s.cases()) {
        if (c.op->kernel().is_constant()) continue;  // F = v and G = w hold to rounding
        const GapOperator& op = *c.op;
        const double tc = s.tc(op).tc;
        auto distances = [&](const GapOperator& g, double tcg, std::span<const double> offsets) {
            const CriticalLimits lim = estimate_limits(g, tcg, opts, offsets, s.cfg().threads);
            const auto F = F_of_x(g.kernel(), g.grid(), lim.v, tcg);
            const auto G = G_of_x(g.kernel(), g.grid(), lim.v, lim.w, tcg);
            return std::pair{relative_sup_distance(F, lim.v), relative_sup_distance(G, lim.w)};
        };
        const auto [f0, g0] = distances(op, tc, kDefaultOffsets);

        const GapOperator fine(op.kernel(), op.params(), 2 * op.size());
        const double tc_fine = locate_tc(fine, s.settings()).tc;
        std::vector<double> half;
        for (double o : kDefaultOffsets) half.push_back(0.5 * o);
        const auto [f1, g1] = distances(fine, tc_fine, half);

        d << c.name << ": |F-v| " << sci(f0) << " -> " << sci(f1) << ", |G-w| " << sci(g0) << " -> " << sci(g1) << "; ";
        ok = ok && f0 <= s.cfg().tol.consistency_v && g0 <= s.cfg().tol.consistency_w && f1 < f0 && g1 < g0;
    }
    return ok;
}

}  // namespace

AcceptanceReport run_acceptance(const RunConfig& cfg, std::ostream* progress) {
    const std::vector<std::pair<std::string, Check>> checks = {
        {"closed form", closed_form},
        {"sandwich", sandwich},
        {"constant-kernel collapse", constant_collapse},
        {"T_c bracketing", tc_bracket},
        {"Lipschitz bound", lipschitz},
        {"weak-coupling constants", weak_coupling},
        {"jump consistency", jump_consistency},
        {"smoothness at T_c", smoothness},
        {"g function", g_suite},
        {"zero propagation / uniqueness", zero_propagation},
        {"F/G self-consistency", fg_consistency},
    };

    AcceptanceReport report;
    Suite suite(cfg);
    int id = 0;
    for (const auto& [title, check] : checks) {
        CriterionResult r;
        r.id = ++id;
        r.title = title;
        const auto t0 = std::chrono::steady_clock::now();
        std::ostringstream detail;
        try {
            r.pass = check(suite, detail);
        } catch (const std::exception& e) {
            r.pass = false;
            detail << "error: " << e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.detail = detail.str();
        if (progress) *progress << format_line(r) << std::endl;
        report.results.push_back(std::move(r));
    }
    return report;
}

}  // namespace gapeq::cli
