#include "gapeq/roots.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "gapeq/errors.hpp"

namespace gapeq {

RootResult brent(const std::function<double(double)>& f, double lo, double hi, double xtol,
                 int max_iter) {
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return {a, a, a, 0};
    if (fb == 0.0) return {b, b, b, 0};
    if ((fa > 0.0) == (fb > 0.0)) throw DomainError("brent: root is not bracketed");

    constexpr double eps = std::numeric_limits<double>::epsilon();
    double c = a, fc = fa, d = b - a, e = d;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) break;

        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
        fb = f(b);
    }
    return {b, std::min(b, c), std::max(b, c), iter};
}

std::pair<double, double> bracket_geometric(const std::function<double(double)>& f, double start,
                                            double factor, int max_steps) {
    double lo = start, hi = start;
    double flo = f(lo), fhi = flo;
    for (int i = 0; i < max_steps; ++i) {
        if ((flo > 0.0) != (fhi > 0.0) || flo == 0.0 || fhi == 0.0) return {lo, hi};
        const double next_lo = lo / factor, next_hi = hi * factor;
        const double f_next_lo = f(next_lo), f_next_hi = f(next_hi);
        if ((f_next_lo > 0.0) != (flo > 0.0)) return {next_lo, lo};
        if ((f_next_hi > 0.0) != (fhi > 0.0)) return {hi, next_hi};
        lo = next_lo; flo = f_next_lo;
        hi = next_hi; fhi = f_next_hi;
    }
    throw DomainError("bracket_geometric: no sign change found");
}

}  // namespace gapeq
