#pragma once

// Run configuration: a flat `key = value` text file with `#` comments.
//
//   epsilon = 0.01
//   kernel.form = separable
//   kernel.coefficients = 0.1, 0.02
//
// Unknown keys are rejected so that typos do not silently fall back to defaults.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gapeq/gap_solver.hpp"
#include "gapeq/model.hpp"

namespace gapeq::cli {

struct KernelSpec {
    std::string form = "separable";  // constant | separable | tabulated
    double value = 0.5;              // constant
    double base = 0.4;               // separable: base + sum_k c_k (x xi)^(k+1)
    std::vector<double> coefficients{0.1};
    std::optional<double> u1, u2;    // declared bounds; sampled from the kernel when absent
    std::string table_path;          // tabulated
};

struct DosSpec {
    std::string form = "constant";   // zero | constant | free_electron
    double scale = 0.0;              // free_electron: N(x) = scale sqrt(x + mu); 0 means N0 / sqrt(mu)
};

struct TemperatureSpec {
    // Absolute bounds override the fractions of tau_2.
    std::optional<double> min, max;
    double min_fraction = 0.05;
    double max_fraction = 1.2;
    int count = 25;
    std::optional<double> solve;     // `solve` temperature; default 0.5 tau_1
};

struct ThermoSpec {
    double min_fraction = 0.2;       // of T_c
    double max_fraction = 1.5;
    int count = 27;
    double step_fraction = 1e-4;     // differencing step h / T_c
    bool richardson = true;
};

struct Tolerances {
    double tc = 1e-14;               // bisection bracket width / tau_1
    double consistency_v = 0.05;     // |F - v| / |v|
    double consistency_w = 0.10;     // |G - w| / |w|
    double jump = 0.03;              // formula vs numeric jump
};

struct RunConfig {
    PhysicalParams params;
    KernelSpec kernel;
    DosSpec dos;
    std::size_t nodes = 64;
    TemperatureSpec temperature;
    ThermoSpec thermo;
    SolverOptions solver;
    Tolerances tol;
    std::filesystem::path out_dir = ".";
    std::string format = "both";     // csv | json | both
    int threads = 1;
    std::filesystem::path source;    // directory of the config file, for relative table paths

    bool wants_csv() const { return format == "csv" || format == "both"; }
    bool wants_json() const { return format == "json" || format == "both"; }
};

/// Parses `key = value` text. Throws ConfigError with the line number on malformed input.
RunConfig parse_config(const std::string& text, const std::filesystem::path& source_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

/// Applies one `key=value` override (same keys as the file).
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Checks ranges (tolerances > 0, nodes >= 16, known forms, ...). Throws ConfigError.
void validate(const RunConfig& cfg);

/// Every effective setting as sorted `key = value` lines.
std::string canonical(const RunConfig& cfg);

/// FNV-1a 64 of canonical(cfg), as 16 hex digits.
std::string digest(const RunConfig& cfg);

Kernel build_kernel(const RunConfig& cfg);
DensityOfStates build_dos(const RunConfig& cfg);

/// min and max of U over a dense sample of [eps, hw]^2 (plus the corners).
std::pair<double, double> sample_kernel_range(const Kernel::Form& form, const PhysicalParams& params,
                                              std::size_t n = 201);

}  // namespace gapeq::cli
