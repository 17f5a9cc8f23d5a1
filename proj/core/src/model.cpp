#include "gapeq/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "gapeq/errors.hpp"
#include "gapeq/quadrature.hpp"

namespace gapeq {

void PhysicalParams::validate() const {
    if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
    if (!(epsilon < hbar_omega_d)) throw ParameterError("epsilon must be below hbar_omega_d");
    if (!(hbar_omega_d < mu)) throw ParameterError("hbar_omega_d must be below mu");
    if (!(n0 > 0.0)) throw ParameterError("n0 must be positive");
}

// ---------------------------------------------------------------------------
// EnergyGrid

EnergyGrid EnergyGrid::gauss_legendre(double lo, double hi, std::size_t n) {
    return composite(lo, hi, 1, n, 1.0);
}

EnergyGrid EnergyGrid::composite(double lo, double hi, std::size_t panels,
                                 std::size_t nodes_per_panel, double grading) {
    if (!(lo < hi)) throw DomainError("EnergyGrid: require lo < hi");
    if (panels == 0 || nodes_per_panel == 0) throw DomainError("EnergyGrid: empty grid");
    if (!(grading > 0.0)) throw DomainError("EnergyGrid: grading must be positive");

    EnergyGrid g;
    g.per_panel_ = nodes_per_panel;
    g.grading_ = grading;

    double total = 0.0, width = 1.0;
    for (std::size_t p = 0; p < panels; ++p, width *= grading) total += width;
    g.breaks_.push_back(lo);
    width = (hi - lo) / total;
    for (std::size_t p = 0; p + 1 < panels; ++p, width *= grading)
        g.breaks_.push_back(g.breaks_.back() + width);
    g.breaks_.push_back(hi);

    const auto [ref_x, ref_w] = gauss_legendre_rule(nodes_per_panel);
    std::vector<double> ref_bary(nodes_per_panel);
    for (std::size_t j = 0; j < nodes_per_panel; ++j) {
        const double s = std::sqrt((1.0 - ref_x[j] * ref_x[j]) * ref_w[j]);
        ref_bary[j] = (j % 2 == 0) ? s : -s;
    }

    g.nodes_.reserve(panels * nodes_per_panel);
    for (std::size_t p = 0; p < panels; ++p) {
        const double a = g.breaks_[p], b = g.breaks_[p + 1];
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (std::size_t j = 0; j < nodes_per_panel; ++j) {
            g.nodes_.push_back(c + h * ref_x[j]);
            g.weights_.push_back(h * ref_w[j]);
            g.bary_.push_back(ref_bary[j]);
        }
    }
    return g;
}

double EnergyGrid::integrate(std::span<const double> values) const {
    if (values.size() != nodes_.size()) throw DomainError("EnergyGrid::integrate: size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) sum += weights_[i] * values[i];
    return sum;
}

double EnergyGrid::interpolate(std::span<const double> values, double x) const {
    if (values.size() != nodes_.size()) throw DomainError("EnergyGrid::interpolate: size mismatch");
    const double slack = 1e-12 * (hi() - lo());
    if (x < lo() - slack || x > hi() + slack) throw DomainError("EnergyGrid::interpolate: x outside grid");

    auto it = std::upper_bound(breaks_.begin() + 1, breaks_.end() - 1, x);
    const std::size_t panel = static_cast<std::size_t>(it - (breaks_.begin() + 1));
    const std::size_t off = panel * per_panel_;
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < per_panel_; ++j) {
        const double d = x - nodes_[off + j];
        if (d == 0.0) return values[off + j];
        const double t = bary_[off + j] / d;
        num += t * values[off + j];
        den += t;
    }
    return num / den;
}

EnergyGrid EnergyGrid::refined() const {
    return composite(lo(), hi(), panels(), 2 * per_panel_, grading_);
}

// ---------------------------------------------------------------------------
// BicubicSpline

namespace {

// Second derivatives of the natural cubic spline through (x, y).
std::vector<double> natural_spline_second_derivatives(std::span<const double> x,
                                                      std::span<const double> y) {
    const std::size_t n = x.size();
    std::vector<double> m(n, 0.0);
    if (n < 3) return m;
    std::vector<double> c(n, 0.0), d(n, 0.0);
    // Thomas algorithm on the interior equations.
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
        const double a = h0 / 6.0, b = (h0 + h1) / 3.0, cc = h1 / 6.0;
        const double rhs = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        const double denom = b - a * c[i - 1];
        c[i] = cc / denom;
        d[i] = (rhs - a * d[i - 1]) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i) m[i] = d[i] - c[i] * m[i + 1];
    return m;
}

struct SplineBasis {
    std::size_t lo;
    double a, b, c, d;  // weights on f_lo, f_hi, M_lo, M_hi
};

SplineBasis spline_basis(std::span<const double> knots, double t) {
    auto it = std::upper_bound(knots.begin() + 1, knots.end() - 1, t);
    const std::size_t k = static_cast<std::size_t>(it - knots.begin()) - 1;
    const double h = knots[k + 1] - knots[k];
    const double a = (knots[k + 1] - t) / h;
    const double b = 1.0 - a;
    return {k, a, b, (a * a * a - a) * h * h / 6.0, (b * b * b - b) * h * h / 6.0};
}

void check_strictly_increasing(std::span<const double> v, const char* what) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) throw ParameterError(std::string(what) + " must be strictly increasing");
}

}  // namespace

BicubicSpline::BicubicSpline(std::vector<double> x, std::vector<double> y, std::vector<double> values)
    : x_(std::move(x)), y_(std::move(y)), f_(std::move(values)) {
    const std::size_t nx = x_.size(), ny = y_.size();
    if (nx < 2 || ny < 2) throw ParameterError("BicubicSpline: need at least a 2x2 table");
    if (f_.size() != nx * ny) throw ParameterError("BicubicSpline: table size mismatch");
    check_strictly_increasing(x_, "BicubicSpline x coordinates");
    check_strictly_increasing(y_, "BicubicSpline y coordinates");

    fyy_.resize(nx * ny);
    for (std::size_t i = 0; i < nx; ++i) {
        auto m = natural_spline_second_derivatives(y_, std::span(f_).subspan(i * ny, ny));
        std::copy(m.begin(), m.end(), fyy_.begin() + static_cast<std::ptrdiff_t>(i * ny));
    }
    fxx_.resize(nx * ny);
    fxxyy_.resize(nx * ny);
    std::vector<double> col(nx), colyy(nx);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            col[i] = f_[i * ny + j];
            colyy[i] = fyy_[i * ny + j];
        }
        const auto mx = natural_spline_second_derivatives(x_, col);
        const auto mxy = natural_spline_second_derivatives(x_, colyy);
        for (std::size_t i = 0; i < nx; ++i) {
            fxx_[i * ny + j] = mx[i];
            fxxyy_[i * ny + j] = mxy[i];
        }
    }
}

BicubicSpline BicubicSpline::sample(const std::function<double(double, double)>& f,
                                    std::vector<double> x, std::vector<double> y) {
    std::vector<double> values;
    values.reserve(x.size() * y.size());
    for (double xi : x)
        for (double yj : y) values.push_back(f(xi, yj));
    return BicubicSpline(std::move(x), std::move(y), std::move(values));
}

BicubicSpline BicubicSpline::from_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open kernel table: " + path.string());

    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    auto parse = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("kernel table " + path.string() + ": bad number '" + s + "'");
        }
    };

    std::string line;
    std::vector<double> xs, ys, values;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto cells = split(line);
        if (header) {
            for (std::size_t j = 1; j < cells.size(); ++j) ys.push_back(parse(cells[j]));
            header = false;
            continue;
        }
        if (cells.size() != ys.size() + 1)
            throw ConfigError("kernel table " + path.string() + ": ragged row");
        xs.push_back(parse(cells[0]));
        for (std::size_t j = 1; j < cells.size(); ++j) values.push_back(parse(cells[j]));
    }
    return BicubicSpline(std::move(xs), std::move(ys), std::move(values));
}

double BicubicSpline::operator()(double x, double y) const {
    const std::size_t ny = y_.size();
    const SplineBasis bx = spline_basis(x_, x);
    const SplineBasis by = spline_basis(y_, y);
    const std::array<std::size_t, 2> ix = {bx.lo, bx.lo + 1};
    const std::array<std::size_t, 2> iy = {by.lo, by.lo + 1};
    const std::array<double, 2> vx = {bx.a, bx.b}, mx = {bx.c, bx.d};
    const std::array<double, 2> vy = {by.a, by.b}, my = {by.c, by.d};
    double s = 0.0;
    for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) {
            const std::size_t k = ix[p] * ny + iy[q];
            s += vx[p] * vy[q] * f_[k] + vx[p] * my[q] * fyy_[k] + mx[p] * vy[q] * fxx_[k] +
                 mx[p] * my[q] * fxxyy_[k];
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Kernel

Kernel::Kernel(Form form, double u1, double u2, const PhysicalParams& params)
    : form_(std::move(form)), u1_(u1), u2_(u2), lo_(params.epsilon), hi_(params.hbar_omega_d) {
    params.validate();
    if (!(u1 > 0.0)) throw ParameterError("kernel lower bound u1 must be positive");
    if (!(u1 <= u2)) throw ParameterError("kernel bounds require u1 <= u2");
    if (const auto* table = std::get_if<BicubicSpline>(&form_)) {
        const double slack = 1e-12 * (hi_ - lo_);
        if (table->x().front() > lo_ + slack || table->x().back() < hi_ - slack ||
            table->y().front() > lo_ + slack || table->y().back() < hi_ - slack)
            throw ParameterError("kernel table does not cover [epsilon, hbar_omega_d]^2");
    }
}

Kernel Kernel::constant(double value, const PhysicalParams& params) {
    return Kernel(ConstantCoupling{value}, value, value, params);
}

std::string_view Kernel::form_name() const {
    switch (form_.index()) {
        case 0: return "constant";
        case 1: return "separable";
        default: return "tabulated";
    }
}

double Kernel::eval(double x, double xi) const {
    struct Visitor {
        double x, xi;
        double operator()(const ConstantCoupling& c) const { return c.value; }
        double operator()(const SeparableCoupling& s) const {
            const double p = x * xi;
            double term = 1.0, sum = s.base;
            for (double c : s.coefficients) {
                term *= p;
                sum += c * term;
            }
            return sum;
        }
        double operator()(const BicubicSpline& t) const { return t(x, xi); }
    };
    return std::visit(Visitor{x, xi}, form_);
}

double Kernel::operator()(double x, double xi) const {
    const double slack = 1e-12 * (hi_ - lo_);
    if (x < lo_ - slack || x > hi_ + slack || xi < lo_ - slack || xi > hi_ + slack) {
        std::ostringstream os;
        os << "kernel evaluated outside [" << lo_ << ", " << hi_ << "]^2 at (" << x << ", " << xi << ")";
        throw DomainError(os.str());
    }
    return eval(std::clamp(x, lo_, hi_), std::clamp(xi, lo_, hi_));
}

KernelReport validate_kernel(const Kernel& k, const EnergyGrid& grid) {
    KernelReport r;
    r.min = std::numeric_limits<double>::infinity();
    r.max = -std::numeric_limits<double>::infinity();
    for (double x : grid.nodes()) {
        for (double xi : grid.nodes()) {
            const double u = k(x, xi);
            r.min = std::min(r.min, u);
            r.max = std::max(r.max, u);
        }
    }
    r.lower_ok = r.min >= k.u1();
    r.upper_ok = r.max <= k.u2();
    return r;
}

// ---------------------------------------------------------------------------
// DensityOfStates

DensityOfStates DensityOfStates::zero() { return {}; }

DensityOfStates DensityOfStates::constant(double n0) {
    if (!(n0 >= 0.0)) throw ParameterError("density of states must be nonnegative");
    DensityOfStates d;
    d.kind_ = n0 == 0.0 ? Kind::zero : Kind::constant;
    d.scale_ = n0;
    return d;
}

DensityOfStates DensityOfStates::free_electron(double c, double mu) {
    if (!(c >= 0.0) || !(mu > 0.0)) throw ParameterError("free-electron density needs c >= 0, mu > 0");
    DensityOfStates d;
    d.kind_ = c == 0.0 ? Kind::zero : Kind::free_electron;
    d.scale_ = c;
    d.mu_ = mu;
    return d;
}

DensityOfStates DensityOfStates::tabulated(std::vector<double> x, std::vector<double> values) {
    if (x.size() < 2 || x.size() != values.size()) throw ParameterError("tabulated density: bad table");
    check_strictly_increasing(x, "tabulated density abscissae");
    if (std::any_of(values.begin(), values.end(), [](double v) { return !(v >= 0.0); }))
        throw ParameterError("tabulated density must be nonnegative");
    if (!(x.back() > 0.0)) throw ParameterError("tabulated density must extend to positive energies");
    DensityOfStates d;
    d.kind_ = Kind::tabulated;
    d.mu_ = -x.front();
    d.x_ = std::move(x);
    d.values_ = std::move(values);
    return d;
}

double DensityOfStates::operator()(double x) const {
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::constant: return scale_;
        case Kind::free_electron:
            if (x < -mu_) throw DomainError("density of states evaluated below -mu");
            return scale_ * std::sqrt(x + mu_);
        case Kind::tabulated: {
            if (x < x_.front()) throw DomainError("density of states evaluated below the table");
            if (x >= x_.back()) return values_.back() * std::sqrt(x / x_.back());
            auto it = std::upper_bound(x_.begin(), x_.end(), x);
            const std::size_t k = static_cast<std::size_t>(it - x_.begin()) - 1;
            const double t = (x - x_[k]) / (x_[k + 1] - x_[k]);
            return (1.0 - t) * values_[k] + t * values_[k + 1];
        }
    }
    return 0.0;
}

double DensityOfStates::growth_constant(double from) const {
    if (!(from > 0.0)) throw DomainError("growth_constant: require from > 0");
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::constant: return scale_ / std::sqrt(from);
        case Kind::free_electron: return scale_ * std::sqrt(1.0 + mu_ / from);
        case Kind::tabulated: {
            // Piecewise linear over sqrt is maximized at a breakpoint or at `from`.
            double c = (*this)(from) / std::sqrt(from);
            for (std::size_t i = 0; i < x_.size(); ++i)
                if (x_[i] > from) c = std::max(c, values_[i] / std::sqrt(x_[i]));
            return c;
        }
    }
    return 0.0;
}

}  // namespace gapeq
