#pragma once

// Physical stage shared by every computation: the cutoffs, the interaction
// kernel U(x, xi), the energy grid used for Nystrom discretization, and the
// density of states entering the normal-state potential.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace gapeq {

/// Energies are measured from the chemical potential, temperatures in energy units (k_B = 1).
struct PhysicalParams {
    double epsilon = 0.01;       ///< lower cutoff of the interaction shell
    double hbar_omega_d = 1.0;   ///< Debye energy
    double mu = 10.0;            ///< chemical potential
    double n0 = 1.0;             ///< density of states at the Fermi surface

    /// Throws ParameterError unless 0 < epsilon < hbar_omega_d < mu and n0 > 0.
    void validate() const;
};

/// Quadrature nodes and weights on [lo, hi]; composite Gauss-Legendre panels.
class EnergyGrid {
public:
    /// Single Gauss-Legendre panel mapped onto [lo, hi].
    static EnergyGrid gauss_legendre(double lo, double hi, std::size_t n = 64);

    /// `panels` Gauss-Legendre panels. Panel widths grow geometrically by `grading`
    /// from lo to hi (grading = 1 gives equal panels).
    static EnergyGrid composite(double lo, double hi, std::size_t panels,
                                std::size_t nodes_per_panel, double grading = 1.0);

    static EnergyGrid for_params(const PhysicalParams& params, std::size_t n = 64) {
        return gauss_legendre(params.epsilon, params.hbar_omega_d, n);
    }

    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }
    std::size_t size() const { return nodes_.size(); }
    double lo() const { return breaks_.front(); }
    double hi() const { return breaks_.back(); }
    std::size_t panels() const { return breaks_.size() - 1; }
    std::size_t nodes_per_panel() const { return per_panel_; }

    /// Sum of weights times values.
    double integrate(std::span<const double> values) const;

    /// Barycentric Lagrange interpolation of node values within the panel containing x.
    double interpolate(std::span<const double> values, double x) const;

    /// Same panel layout, twice the nodes per panel.
    EnergyGrid refined() const;

private:
    EnergyGrid() = default;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> bary_;    // barycentric weights, per node
    std::vector<double> breaks_;  // panel boundaries
    std::size_t per_panel_ = 0;
    double grading_ = 1.0;
};

/// Tensor-product natural cubic spline on a rectangular table (C^2 in both arguments).
class BicubicSpline {
public:
    /// `values` is row-major: values[i * y.size() + j] = f(x[i], y[j]).
    BicubicSpline(std::vector<double> x, std::vector<double> y, std::vector<double> values);

    static BicubicSpline sample(const std::function<double(double, double)>& f,
                                std::vector<double> x, std::vector<double> y);

    /// First row holds the xi (second argument) coordinates after a leading corner
    /// cell; every following row is `x, f(x, xi_0), f(x, xi_1), ...`.
    static BicubicSpline from_csv(const std::filesystem::path& path);

    double operator()(double x, double y) const;

    std::span<const double> x() const { return x_; }
    std::span<const double> y() const { return y_; }
    double value(std::size_t i, std::size_t j) const { return f_[i * y_.size() + j]; }

private:
    std::vector<double> x_, y_;
    std::vector<double> f_, fxx_, fyy_, fxxyy_;
};

struct ConstantCoupling {
    double value;
};

/// U(x, xi) = base + sum_k coefficients[k-1] * (x * xi)^k. Symmetric by construction.
struct SeparableCoupling {
    double base;
    std::vector<double> coefficients;
};

class Kernel {
public:
    using Form = std::variant<ConstantCoupling, SeparableCoupling, BicubicSpline>;

    /// Declared bounds must satisfy 0 < u1 <= u2. Evaluation is restricted to
    /// [epsilon, hbar_omega_d]^2 of `params`.
    Kernel(Form form, double u1, double u2, const PhysicalParams& params);

    /// Constant coupling with u1 = u2 = value.
    static Kernel constant(double value, const PhysicalParams& params);

    /// U(x, xi); throws DomainError outside the interaction shell.
    double operator()(double x, double xi) const;

    double u1() const { return u1_; }
    double u2() const { return u2_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const Form& form() const { return form_; }
    bool is_constant() const { return std::holds_alternative<ConstantCoupling>(form_); }
    std::string_view form_name() const;

private:
    double eval(double x, double xi) const;

    Form form_;
    double u1_, u2_;
    double lo_, hi_;
};

inline double eval_kernel(const Kernel& k, double x, double xi) { return k(x, xi); }

struct KernelReport {
    double min = 0.0;
    double max = 0.0;
    bool lower_ok = false;  ///< min >= u1
    bool upper_ok = false;  ///< max <= u2
    bool pass() const { return lower_ok && upper_ok; }
};

/// Min/max of U over grid x grid against the declared [u1, u2]. Never throws on failure.
KernelReport validate_kernel(const Kernel& k, const EnergyGrid& grid);

/// N(x) on [-mu, inf). Continuous, nonnegative, and O(sqrt(x)) at large x.
class DensityOfStates {
public:
    enum class Kind { zero, constant, free_electron, tabulated };

    static DensityOfStates zero();
    static DensityOfStates constant(double n0);
    /// N(x) = c * sqrt(x + mu).
    static DensityOfStates free_electron(double c, double mu);
    /// Piecewise linear through (x, values); beyond the last point N grows like sqrt(x).
    static DensityOfStates tabulated(std::vector<double> x, std::vector<double> values);

    double operator()(double x) const;

    /// Smallest C with N(x) <= C * sqrt(x) for all x >= from (from > 0).
    double growth_constant(double from) const;

    Kind kind() const { return kind_; }
    bool is_zero() const { return kind_ == Kind::zero; }

private:
    Kind kind_ = Kind::zero;
    double scale_ = 0.0;
    double mu_ = 0.0;
    std::vector<double> x_, values_;
};

}  // namespace gapeq
