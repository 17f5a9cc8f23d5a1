#include "commands.hpp"

#include <exception>
#include <ostream>

#include "acceptance.hpp"
#include "analysis.hpp"
#include "gapeq/errors.hpp"
#include "output.hpp"

namespace gapeq::cli {

namespace {

struct Context {
    const RunConfig& cfg;
    std::string digest;
    Kernel kernel;
    GapOperator op;
    JumpSettings settings;

    explicit Context(const RunConfig& c)
        : cfg(c), digest(cli::digest(c)), kernel(build_kernel(c)), op(kernel, c.params, c.nodes) {
        settings.solver = c.solver;
        settings.tc_tol = c.tol.tc;
        settings.step_fraction = c.thermo.step_fraction;
        settings.richardson = c.thermo.richardson;
        settings.threads = c.threads;
    }

    std::filesystem::path path(const std::string& name, const char* ext) const { return cfg.out_dir / (name + ext); }

    void emit(const std::string& name, const CsvTable* csv, const Json* json, std::ostream& out) const {
        if (csv && cfg.wants_csv()) {
            write_csv(path(name, ".csv"), *csv, digest);
            out << "wrote " << path(name, ".csv").string() << "\n";
        }
        if (json && cfg.wants_json()) {
            write_json(path(name, ".json"), *json, digest);
            out << "wrote " << path(name, ".json").string() << "\n";
        }
    }

    std::vector<double> sweep_temperatures() const {
        const auto& t = cfg.temperature;
        const double lo = t.min.value_or(t.min_fraction * op.upper().tau());
        const double hi = t.max.value_or(t.max_fraction * op.upper().tau());
        std::vector<double> out;
        for (int i = 0; i < t.count; ++i) out.push_back(t.count == 1 ? lo : lo + (hi - lo) * i / (t.count - 1));
        return out;
    }
};

Json kernel_json(const GapOperator& op) {
    Json k;
    k["form"] = std::string(op.kernel().form_name());
    k["u1"] = rounded(op.kernel().u1());
    k["u2"] = rounded(op.kernel().u2());
    return k;
}

Json solution_json(const GapSolution& s) {
    Json j;
    j["T"] = rounded(s.T);
    j["phase"] = std::string(to_string(s.phase));
    j["iterations"] = s.iterations;
    j["residual"] = rounded(s.residual);
    j["damping_engaged"] = s.damping_engaged;
    j["residual_history"] = json_array(s.residual_history);
    j["values"] = json_array(s.values);
    return j;
}

int cmd_simplified(const Context& c, std::ostream& out) {
    const auto& lo = c.op.lower();
    const auto& hi = c.op.upper();
    CsvTable csv({"T", "delta1", "delta2"});
    std::vector<double> t = c.sweep_temperatures(), d1, d2;
    for (double T : t) {
        d1.push_back(lo.delta(T));
        d2.push_back(hi.delta(T));
        csv.add({num(T), num(d1.back()), num(d2.back())});
    }
    Json j;
    j["u1"] = rounded(lo.coupling());
    j["u2"] = rounded(hi.coupling());
    j["tau1"] = rounded(lo.tau());
    j["tau2"] = rounded(hi.tau());
    j["delta1_0"] = rounded(lo.delta0());
    j["delta2_0"] = rounded(hi.delta0());
    j["temperatures"] = json_array(t);
    j["delta1"] = json_array(d1);
    j["delta2"] = json_array(d2);
    c.emit("simplified", &csv, &j, out);
    out << "tau1 = " << num(lo.tau()) << ", tau2 = " << num(hi.tau()) << "\n";
    return kSuccess;
}

int cmd_tc(const Context& c, std::ostream& out) {
    const TcResult r = locate_tc(c.op, c.settings);
    Json j;
    j["kernel"] = kernel_json(c.op);
    j["tau1"] = rounded(c.op.lower().tau());
    j["tau2"] = rounded(c.op.upper().tau());
    j["tc"] = rounded(r.tc);
    j["bracket"] = json_array({r.lo, r.hi});
    j["bisection_steps"] = r.history.size();
    CsvTable csv({"quantity", "value"});
    csv.add({"tau1", num(c.op.lower().tau())});
    csv.add({"tau2", num(c.op.upper().tau())});
    csv.add({"tc", num(r.tc)});
    c.emit("tc", &csv, &j, out);
    out << "tau1 = " << num(c.op.lower().tau()) << ", tc = " << num(r.tc) << ", tau2 = " << num(c.op.upper().tau())
        << "\n";
    return kSuccess;
}

int cmd_solve(const Context& c, std::ostream& out) {
    const double T = c.cfg.temperature.solve.value_or(0.5 * c.op.lower().tau());
    const GapSolution s = c.op.solve_fixed_point(T, c.cfg.solver);
    const auto x = c.op.grid().nodes();
    const double d1 = c.op.lower().delta(T), d2 = c.op.upper().delta(T);
    CsvTable csv({"x", "u", "delta1", "delta2"});
    for (std::size_t j = 0; j < x.size(); ++j) csv.add({num(x[j]), num(s.values[j]), num(d1), num(d2)});
    Json j = solution_json(s);
    j["x"] = json_array({x.begin(), x.end()});
    j["delta1"] = rounded(d1);
    j["delta2"] = rounded(d2);
    j["sandwich_excess"] = rounded(c.op.sandwich_excess(s));
    c.emit("solve", &csv, &j, out);
    out << "T = " << num(T) << ": " << to_string(s.phase) << ", sup u = " << num(s.sup()) << ", "
        << s.iterations << " iterations\n";
    return kSuccess;
}

int cmd_sweep(const Context& c, std::ostream& out) {
    const auto temps = c.sweep_temperatures();
    const double tc = locate_tc(c.op, c.settings).tc;
    const GapSurface s = c.op.sweep_temperature(temps, c.cfg.solver, tc, true, c.cfg.threads);
    const auto x = c.op.grid().nodes();
    CsvTable csv({"T", "x", "u"});
    for (std::size_t i = 0; i < temps.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) csv.add({num(temps[i]), num(x[j]), num(s.values[i][j])});
    Json j;
    j["kernel"] = kernel_json(c.op);
    j["tc"] = rounded(tc);
    j["tau1"] = rounded(c.op.lower().tau());
    j["tau2"] = rounded(c.op.upper().tau());
    j["closeness"] = rounded(s.closeness);
    j["temperatures"] = json_array(temps);
    j["x"] = json_array({x.begin(), x.end()});
    Json values = Json::array();
    for (const auto& row : s.values) values.push_back(json_array(row));
    j["values"] = values;
    j["iterations"] = s.iterations;
    j["residuals"] = json_array(s.residuals);
    j["solver"] = {{"method", std::string(to_string(c.cfg.solver.method))}, {"tol", rounded(c.cfg.solver.tol)},
                   {"max_iter", c.cfg.solver.max_iter}};
    c.emit("sweep", &csv, &j, out);
    out << temps.size() << " slices, tc = " << num(tc) << ", closeness = " << num(s.closeness) << "\n";
    return kSuccess;
}

int cmd_thermo(const Context& c, std::ostream& out) {
    const double tc = locate_tc(c.op, c.settings).tc;
    const double h = c.cfg.thermo.step_fraction * tc;
    const auto temps = thermo_temperatures(c.cfg.thermo.min_fraction * tc, c.cfg.thermo.max_fraction * tc,
                                           c.cfg.thermo.count, tc, h);
    const ThermoModel model(c.op, build_dos(c.cfg), tc, c.cfg.solver);
    const ThermoCurve curve =
        entropy_and_cv([&](double T) { return model.omega(T); }, temps, tc, h, c.cfg.thermo.richardson, c.cfg.threads);

    // Rows in temperature order with the two limits at tc between the sides.
    std::vector<ThermoPoint> rows;
    for (const auto& p : curve.points)
        if (p.T < tc) rows.push_back(p);
    rows.push_back(curve.tc_minus);
    rows.push_back(curve.tc_plus);
    for (const auto& p : curve.points)
        if (p.T > tc) rows.push_back(p);

    CsvTable csv({"T", "omega", "entropy", "cv", "side"});
    Json points = Json::array();
    for (const auto& p : rows) {
        csv.add({num(p.T), num(p.omega), num(p.entropy), num(p.cv), std::string(to_string(p.side))});
        points.push_back({{"T", rounded(p.T)}, {"omega", rounded(p.omega)}, {"entropy", rounded(p.entropy)},
                          {"cv", rounded(p.cv)}, {"side", std::string(to_string(p.side))}});
    }
    Json j;
    j["tc"] = rounded(tc);
    j["step"] = rounded(h);
    j["cv_jump"] = rounded(curve.cv_jump());
    j["points"] = points;
    c.emit("thermo", &csv, &j, out);
    out << "tc = " << num(tc) << ", C_V jump = " << num(curve.cv_jump()) << "\n";
    return kSuccess;
}

int cmd_jump(const Context& c, std::ostream& out) {
    const JumpAnalysis a = analyze_jump(c.op, build_dos(c.cfg), c.settings);
    const auto x = c.op.grid().nodes();
    const bool have_g = !a.G.empty();
    CsvTable csv({"x", "v", "w", "F", "G"});
    for (std::size_t j = 0; j < x.size(); ++j)
        csv.add({num(x[j]), num(a.limits.v[j]), num(a.limits.w[j]), num(a.F[j]), have_g ? num(a.G[j]) : "nan"});

    const JumpReport& r = a.report;
    Json j;
    j["kernel"] = kernel_json(c.op);
    j["tc"] = rounded(r.tc);
    j["delta_cv"] = rounded(r.delta_cv);
    j["formula_value"] = rounded(r.formula_value);
    j["numeric_value"] = r.numeric_value ? Json(rounded(*r.numeric_value)) : Json(nullptr);
    j["simplified_value"] = r.simplified_value ? Json(rounded(*r.simplified_value)) : Json(nullptr);
    j["psi_second_derivative"] = rounded(r.psi_second_derivative);
    j["offsets"] = json_array(a.limits.offsets);
    j["v_confirmation_spread"] = rounded(a.limits.confirmation_spread());
    j["f_minus_v"] = rounded(relative_sup_distance(a.F, a.limits.v));
    j["g_minus_w"] = have_g ? Json(rounded(relative_sup_distance(a.G, a.limits.w))) : Json(nullptr);
    j["v_quotient_error"] = json_array(a.limits.v_quotient_error);
    j["v_derivative_error"] = json_array(a.limits.v_derivative_error);
    j["w_error"] = json_array(a.limits.w_error);
    c.emit("jump", &csv, &j, out);
    out << "tc = " << num(r.tc) << ", delta C_V = " << num(r.delta_cv) << " (stencil " << num(*r.numeric_value) << ")\n";
    if (!(r.delta_cv > 0.0)) throw InvariantViolation("specific-heat jump is not positive: " + num(r.delta_cv));
    if (!a.limits.positive()) throw InvariantViolation("v(x) is not positive at every node");
    return kSuccess;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const AcceptanceReport report = run_acceptance(cfg, &out);
    CsvTable csv({"criterion", "title", "pass", "seconds", "detail"});
    Json items = Json::array();
    for (const auto& r : report.results) {
        std::string detail = r.detail;
        for (char& ch : detail)
            if (ch == ',') ch = ';';
        csv.add({std::to_string(r.id), r.title, r.pass ? "pass" : "fail", num(r.seconds), detail});
        items.push_back({{"criterion", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}});
    }
    const std::string d = digest(cfg);
    if (cfg.wants_csv()) write_csv(cfg.out_dir / "verify.csv", csv, d);
    if (cfg.wants_json()) write_json(cfg.out_dir / "verify.json", Json{{"results", items}}, d);
    out << (report.all_pass() ? "all criteria pass" : "some criteria FAILED") << "\n";
    return report.all_pass() ? kSuccess : kInvariantViolation;
}

}  // namespace

int run_subcommand(const std::string& name, const RunConfig& cfg, std::ostream& out) {
    validate(cfg);
    if (name == "verify") return cmd_verify(cfg, out);
    const Context c(cfg);
    if (name == "simplified") return cmd_simplified(c, out);
    if (name == "tc") return cmd_tc(c, out);
    if (name == "solve") return cmd_solve(c, out);
    if (name == "sweep") return cmd_sweep(c, out);
    if (name == "thermo") return cmd_thermo(c, out);
    if (name == "jump") return cmd_jump(c, out);
    throw ConfigError("unknown subcommand '" + name + "'");
}

int exit_code_for(std::exception_ptr error, std::ostream& err) {
    try {
        std::rethrow_exception(error);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kConfigError;
    } catch (const ParameterError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NonConvergenceError& e) {
        err << "no convergence: " << e.what();
        if (!e.residual_history().empty()) err << " (last residual " << num(e.residual_history().back()) << ")";
        err << "\n";
        return kNonConvergence;
    } catch (const InvariantViolation& e) {
        err << "invariant violated: " << e.what() << "\n";
        return kInvariantViolation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

}  // namespace gapeq::cli
