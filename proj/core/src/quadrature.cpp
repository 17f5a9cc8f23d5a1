#include "gapeq/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

#include "gapeq/errors.hpp"

namespace gapeq {

namespace {

// Kronrod 15-point abscissae on [0, 1] (symmetric); odd indices carry the Gauss 7-point rule.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

class CheckedIntegrand {
public:
    explicit CheckedIntegrand(const std::function<double(double)>& f) : f_(f) {}
    double operator()(double x) {
        ++count_;
        const double y = f_(x);
        if (!std::isfinite(y)) {
            std::ostringstream os;
            os << "non-finite integrand value at x = " << x;
            throw EvaluationError(os.str(), x);
        }
        return y;
    }
    std::size_t count() const { return count_; }

private:
    const std::function<double(double)>& f_;
    std::size_t count_ = 0;
};

Panel gauss_kronrod_15(CheckedIntegrand& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> gauss_legendre_rule(std::size_t n) {
    if (n == 0) throw DomainError("Gauss-Legendre rule needs at least one node");
    std::vector<double> x(n), w(n);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / static_cast<double>(k);
            }
            dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double step = p0 / dp;
            z -= step;
            if (std::abs(step) < 1e-16) break;
        }
        if (n % 2 == 1 && i == m - 1) z = 0.0;
        const double weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    return {std::move(x), std::move(w)};
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double tol, double rel_tol, std::size_t max_panels) {
    if (!(a < b)) throw DomainError("integrate: require a < b");
    if (!(tol > 0.0)) throw DomainError("integrate: require tol > 0");

    CheckedIntegrand checked(f);
    std::priority_queue<Panel> panels;
    Panel first = gauss_kronrod_15(checked, a, b);
    double value = first.value;
    double error = first.error;
    panels.push(first);

    while (error > std::max(tol, rel_tol * std::abs(value)) && panels.size() < max_panels) {
        const Panel worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted at double precision
        panels.pop();
        const Panel left = gauss_kronrod_15(checked, worst.a, mid);
        const Panel right = gauss_kronrod_15(checked, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }

    // Re-sum to shed the drift of the running updates.
    double sum = 0.0, err = 0.0;
    while (!panels.empty()) {
        sum += panels.top().value;
        err += panels.top().error;
        panels.pop();
    }
    return {sum, err, checked.count()};
}

double upper_gamma_three_halves(double z) {
    if (z <= 0.0) return 0.5 * std::sqrt(std::numbers::pi);
    const double s = std::sqrt(z);
    return s * std::exp(-z) + 0.5 * std::sqrt(std::numbers::pi) * std::erfc(s);
}

double log1p_exp_neg(double y) {
    return y >= 0.0 ? std::log1p(std::exp(-y)) : -y + std::log1p(std::exp(y));
}

QuadratureResult integrate_fermi_tail(const DensityOfStates& n, double a, double T, double tol) {
    if (!(T > 0.0)) throw DomainError("integrate_fermi_tail: require T > 0");
    if (!(a > 0.0)) throw DomainError("integrate_fermi_tail: require a > 0");
    if (!(tol > 0.0)) throw DomainError("integrate_fermi_tail: require tol > 0");
    const double c = n.growth_constant(a);
    if (n.is_zero() || c == 0.0) return {0.0, 0.0, 1};

    const double tail_tol = 0.5 * tol;
    auto tail_bound = [&](double x_max) {
        return c * std::pow(T, 1.5) * upper_gamma_three_halves(x_max / T);
    };

    double x_max = a + T;
    for (int pass = 0; pass < 2; ++pass)
        x_max = a + T * std::max(1.0, std::log(c * std::sqrt(x_max) * T / tail_tol));
    while (tail_bound(x_max) > tail_tol) x_max += T;

    QuadratureResult r = integrate(
        [&](double x) { return n(x) * log1p_exp_neg(x / T); }, a, x_max, tail_tol);
    r.error_estimate += tail_bound(x_max);
    return r;
}

}  // namespace gapeq
