#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "gapeq/errors.hpp"

namespace gapeq::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "' expects a number, got '" + value + "'");
    }
}

int to_int(const std::string& key, const std::string& value) {
    const double d = to_double(key, value);
    if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError("config: '" + key + "' expects an integer");
    return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config: '" + key + "' expects true/false, got '" + value + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"epsilon", [](RunConfig& c, auto& k, auto& v) { c.params.epsilon = to_double(k, v); }},
        {"hbar_omega_d", [](RunConfig& c, auto& k, auto& v) { c.params.hbar_omega_d = to_double(k, v); }},
        {"mu", [](RunConfig& c, auto& k, auto& v) { c.params.mu = to_double(k, v); }},
        {"n0", [](RunConfig& c, auto& k, auto& v) { c.params.n0 = to_double(k, v); }},
        {"kernel.form", [](RunConfig& c, auto&, auto& v) { c.kernel.form = v; }},
        {"kernel.value", [](RunConfig& c, auto& k, auto& v) { c.kernel.value = to_double(k, v); }},
        {"kernel.base", [](RunConfig& c, auto& k, auto& v) { c.kernel.base = to_double(k, v); }},
        {"kernel.coefficients", [](RunConfig& c, auto& k, auto& v) { c.kernel.coefficients = to_list(k, v); }},
        {"kernel.u1", [](RunConfig& c, auto& k, auto& v) { c.kernel.u1 = to_double(k, v); }},
        {"kernel.u2", [](RunConfig& c, auto& k, auto& v) { c.kernel.u2 = to_double(k, v); }},
        {"kernel.table_path", [](RunConfig& c, auto&, auto& v) { c.kernel.table_path = v; }},
        {"dos.form", [](RunConfig& c, auto&, auto& v) { c.dos.form = v; }},
        {"dos.scale", [](RunConfig& c, auto& k, auto& v) { c.dos.scale = to_double(k, v); }},
        {"grid.nodes", [](RunConfig& c, auto& k, auto& v) { c.nodes = static_cast<std::size_t>(std::max(0, to_int(k, v))); }},
        {"temperature.min", [](RunConfig& c, auto& k, auto& v) { c.temperature.min = to_double(k, v); }},
        {"temperature.max", [](RunConfig& c, auto& k, auto& v) { c.temperature.max = to_double(k, v); }},
        {"temperature.min_fraction", [](RunConfig& c, auto& k, auto& v) { c.temperature.min_fraction = to_double(k, v); }},
        {"temperature.max_fraction", [](RunConfig& c, auto& k, auto& v) { c.temperature.max_fraction = to_double(k, v); }},
        {"temperature.count", [](RunConfig& c, auto& k, auto& v) { c.temperature.count = to_int(k, v); }},
        {"temperature.solve", [](RunConfig& c, auto& k, auto& v) { c.temperature.solve = to_double(k, v); }},
        {"thermo.min_fraction", [](RunConfig& c, auto& k, auto& v) { c.thermo.min_fraction = to_double(k, v); }},
        {"thermo.max_fraction", [](RunConfig& c, auto& k, auto& v) { c.thermo.max_fraction = to_double(k, v); }},
        {"thermo.count", [](RunConfig& c, auto& k, auto& v) { c.thermo.count = to_int(k, v); }},
        {"thermo.step_fraction", [](RunConfig& c, auto& k, auto& v) { c.thermo.step_fraction = to_double(k, v); }},
        {"thermo.richardson", [](RunConfig& c, auto& k, auto& v) { c.thermo.richardson = to_bool(k, v); }},
        {"solver.method", [](RunConfig& c, auto&, auto& v) {
             try {
                 c.solver.method = parse_iteration_method(v);
             } catch (const std::exception& e) {
                 throw ConfigError(std::string("config: solver.method: ") + e.what());
             }
         }},
        {"solver.max_iter", [](RunConfig& c, auto& k, auto& v) { c.solver.max_iter = to_int(k, v); }},
        {"solver.damping", [](RunConfig& c, auto& k, auto& v) { c.solver.damping = to_double(k, v); }},
        {"solver.anderson_depth", [](RunConfig& c, auto& k, auto& v) { c.solver.anderson_depth = static_cast<std::size_t>(std::max(0, to_int(k, v))); }},
        {"solver.picard_warmup", [](RunConfig& c, auto& k, auto& v) { c.solver.picard_warmup = to_int(k, v); }},
        {"tol.solver", [](RunConfig& c, auto& k, auto& v) { c.solver.tol = to_double(k, v); }},
        {"tol.zero_threshold", [](RunConfig& c, auto& k, auto& v) { c.solver.zero_threshold_factor = to_double(k, v); }},
        {"tol.tc", [](RunConfig& c, auto& k, auto& v) { c.tol.tc = to_double(k, v); }},
        {"tol.consistency_v", [](RunConfig& c, auto& k, auto& v) { c.tol.consistency_v = to_double(k, v); }},
        {"tol.consistency_w", [](RunConfig& c, auto& k, auto& v) { c.tol.consistency_w = to_double(k, v); }},
        {"tol.jump", [](RunConfig& c, auto& k, auto& v) { c.tol.jump = to_double(k, v); }},
        {"output.format", [](RunConfig& c, auto&, auto& v) { c.format = v; }},
        {"output.dir", [](RunConfig& c, auto&, auto& v) { c.out_dir = v; }},
        {"threads", [](RunConfig& c, auto& k, auto& v) { c.threads = to_int(k, v); }},
    };
    return table;
}

void assign(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("config: unknown key '" + key + "'");
    it->second(cfg, key, value);
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& source_dir) {
    RunConfig cfg;
    cfg.source = source_dir;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        try {
            assign(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
    assign(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void validate(const RunConfig& cfg) {
    try {
        cfg.params.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    const auto& k = cfg.kernel;
    if (k.form != "constant" && k.form != "separable" && k.form != "tabulated")
        throw ConfigError("kernel.form must be constant, separable or tabulated");
    if (k.form == "tabulated" && k.table_path.empty()) throw ConfigError("kernel.table_path is required for tabulated kernels");
    if (cfg.dos.form != "zero" && cfg.dos.form != "constant" && cfg.dos.form != "free_electron")
        throw ConfigError("dos.form must be zero, constant or free_electron");
    if (cfg.nodes < 16) throw ConfigError("grid.nodes must be at least 16");
    if (cfg.temperature.count < 1) throw ConfigError("temperature.count must be positive");
    if (!(cfg.temperature.min_fraction >= 0.0 && cfg.temperature.min_fraction <= cfg.temperature.max_fraction))
        throw ConfigError("temperature fractions must satisfy 0 <= min <= max");
    if (cfg.temperature.min && cfg.temperature.max && !(*cfg.temperature.min <= *cfg.temperature.max && *cfg.temperature.min >= 0.0))
        throw ConfigError("temperature.min/max must satisfy 0 <= min <= max");
    if (cfg.thermo.count < 1) throw ConfigError("thermo.count must be positive");
    if (!(cfg.thermo.min_fraction > 0.0 && cfg.thermo.min_fraction < cfg.thermo.max_fraction))
        throw ConfigError("thermo fractions must satisfy 0 < min < max");
    for (auto [name, v] : {std::pair{"tol.solver", cfg.solver.tol}, {"tol.zero_threshold", cfg.solver.zero_threshold_factor},
                           {"tol.tc", cfg.tol.tc}, {"tol.consistency_v", cfg.tol.consistency_v},
                           {"tol.consistency_w", cfg.tol.consistency_w}, {"tol.jump", cfg.tol.jump},
                           {"thermo.step_fraction", cfg.thermo.step_fraction}, {"solver.damping", cfg.solver.damping}})
        if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
    if (cfg.solver.max_iter < 1) throw ConfigError("solver.max_iter must be positive");
    if (cfg.format != "csv" && cfg.format != "json" && cfg.format != "both")
        throw ConfigError("output format must be csv, json or both");
    if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
}

std::string canonical(const RunConfig& cfg) {
    std::map<std::string, std::string> kv;
    kv["epsilon"] = fmt(cfg.params.epsilon);
    kv["hbar_omega_d"] = fmt(cfg.params.hbar_omega_d);
    kv["mu"] = fmt(cfg.params.mu);
    kv["n0"] = fmt(cfg.params.n0);
    kv["kernel.form"] = cfg.kernel.form;
    if (cfg.kernel.form == "constant") kv["kernel.value"] = fmt(cfg.kernel.value);
    if (cfg.kernel.form == "separable") {
        kv["kernel.base"] = fmt(cfg.kernel.base);
        std::string list;
        for (double c : cfg.kernel.coefficients) list += (list.empty() ? "" : ", ") + fmt(c);
        kv["kernel.coefficients"] = list;
    }
    if (cfg.kernel.form == "tabulated") kv["kernel.table_path"] = cfg.kernel.table_path;
    if (cfg.kernel.u1) kv["kernel.u1"] = fmt(*cfg.kernel.u1);
    if (cfg.kernel.u2) kv["kernel.u2"] = fmt(*cfg.kernel.u2);
    kv["dos.form"] = cfg.dos.form;
    if (cfg.dos.form == "free_electron") kv["dos.scale"] = fmt(cfg.dos.scale);
    kv["grid.nodes"] = std::to_string(cfg.nodes);
    if (cfg.temperature.min) kv["temperature.min"] = fmt(*cfg.temperature.min);
    if (cfg.temperature.max) kv["temperature.max"] = fmt(*cfg.temperature.max);
    kv["temperature.min_fraction"] = fmt(cfg.temperature.min_fraction);
    kv["temperature.max_fraction"] = fmt(cfg.temperature.max_fraction);
    kv["temperature.count"] = std::to_string(cfg.temperature.count);
    if (cfg.temperature.solve) kv["temperature.solve"] = fmt(*cfg.temperature.solve);
    kv["thermo.min_fraction"] = fmt(cfg.thermo.min_fraction);
    kv["thermo.max_fraction"] = fmt(cfg.thermo.max_fraction);
    kv["thermo.count"] = std::to_string(cfg.thermo.count);
    kv["thermo.step_fraction"] = fmt(cfg.thermo.step_fraction);
    kv["thermo.richardson"] = cfg.thermo.richardson ? "true" : "false";
    kv["solver.method"] = std::string(to_string(cfg.solver.method));
    kv["solver.max_iter"] = std::to_string(cfg.solver.max_iter);
    kv["solver.damping"] = fmt(cfg.solver.damping);
    kv["solver.anderson_depth"] = std::to_string(cfg.solver.anderson_depth);
    kv["solver.picard_warmup"] = std::to_string(cfg.solver.picard_warmup);
    kv["tol.solver"] = fmt(cfg.solver.tol);
    kv["tol.zero_threshold"] = fmt(cfg.solver.zero_threshold_factor);
    kv["tol.tc"] = fmt(cfg.tol.tc);
    kv["tol.consistency_v"] = fmt(cfg.tol.consistency_v);
    kv["tol.consistency_w"] = fmt(cfg.tol.consistency_w);
    kv["tol.jump"] = fmt(cfg.tol.jump);
    // Output location, format and thread count do not change results and are left out.
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

std::string digest(const RunConfig& cfg) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : canonical(cfg)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::pair<double, double> sample_kernel_range(const Kernel::Form& form, const PhysicalParams& params, std::size_t n) {
    const Kernel probe(form, 1e-300, 1e300, params);
    double lo = INFINITY, hi = -INFINITY;
    const double a = params.epsilon, b = params.hbar_omega_d;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            const double xi = a + (b - a) * static_cast<double>(j) / static_cast<double>(n - 1);
            const double u = probe(x, xi);
            lo = std::min(lo, u);
            hi = std::max(hi, u);
        }
    }
    return {lo, hi};
}

Kernel build_kernel(const RunConfig& cfg) {
    const auto& spec = cfg.kernel;
    Kernel::Form form = ConstantCoupling{spec.value};
    if (spec.form == "separable") {
        form = SeparableCoupling{spec.base, spec.coefficients};
    } else if (spec.form == "tabulated") {
        std::filesystem::path p = spec.table_path;
        if (p.is_relative()) p = cfg.source / p;
        try {
            form = BicubicSpline::from_csv(p);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError("kernel table " + p.string() + ": " + e.what());
        }
    }
    double u1 = 0.0, u2 = 0.0;
    if (spec.u1 && spec.u2) {
        u1 = *spec.u1;
        u2 = *spec.u2;
    } else {
        const auto [lo, hi] = sample_kernel_range(form, cfg.params);
        u1 = spec.u1.value_or(lo);
        u2 = spec.u2.value_or(hi);
    }
    try {
        Kernel k(std::move(form), u1, u2, cfg.params);
        const auto report = validate_kernel(k, EnergyGrid::for_params(cfg.params, cfg.nodes));
        if (!report.pass())
            throw ConfigError("kernel values [" + fmt(report.min) + ", " + fmt(report.max) +
                              "] on the grid violate the declared bounds [" + fmt(u1) + ", " + fmt(u2) + "]");
        return k;
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
}

DensityOfStates build_dos(const RunConfig& cfg) {
    if (cfg.dos.form == "zero") return DensityOfStates::zero();
    if (cfg.dos.form == "free_electron") {
        const double c = cfg.dos.scale > 0.0 ? cfg.dos.scale : cfg.params.n0 / std::sqrt(cfg.params.mu);
        return DensityOfStates::free_electron(c, cfg.params.mu);
    }
    return DensityOfStates::constant(cfg.params.n0);
}

}  // namespace gapeq::cli
