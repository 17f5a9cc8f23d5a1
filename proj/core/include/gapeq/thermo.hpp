#pragma once

// Thermodynamic potential of the BCS model as a function of temperature:
//
//   Omega(T) = Omega_N(T) + Psi(T)   for 0 < T <= T_c,
//   Omega(T) = Omega_N(T)            for T > T_c,
//
// with entropy S = -dOmega/dT and specific heat C_V = -T d^2 Omega/dT^2 from
// finite differences that never straddle T_c.

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "gapeq/gap_solver.hpp"
#include "gapeq/model.hpp"

namespace gapeq {

/// -2 N0 int x dx - 4 N0 T int ln(1 + e^{-x/T}) dx + Phi(T), integrals over [eps, hw].
double omega_n(double T, const PhysicalParams& params, const DensityOfStates& dos, double tol = 1e-15);

/// Contribution of the states outside the interaction shell.
double phi(double T, const PhysicalParams& params, const DensityOfStates& dos, double tol = 1e-15);

/// Condensation term evaluated with the grid's quadrature rule on node values u(x_j).
double psi(double T, const PhysicalParams& params, const EnergyGrid& grid, std::span<const double> u);

/// Omega with the gap function re-solved at every requested temperature.
class ThermoModel {
public:
    ThermoModel(const GapOperator& op, DensityOfStates dos, double tc, SolverOptions opts = {});

    double tc() const { return tc_; }
    const GapOperator& gap() const { return op_; }

    double omega_n(double T) const;
    /// 0 at and above T_c.
    double psi(double T) const;
    double omega(double T) const;

private:
    const GapOperator& op_;
    DensityOfStates dos_;
    double tc_;
    SolverOptions opts_;
};

enum class Side { below, above, tc_minus, tc_plus };
std::string_view to_string(Side s);

struct ThermoPoint {
    double T = 0.0;
    double omega = 0.0;
    double entropy = 0.0;
    double cv = 0.0;
    Side side = Side::below;
};

struct ThermoCurve {
    std::vector<ThermoPoint> points;
    double tc = 0.0;
    double step = 0.0;
    ThermoPoint tc_minus;  ///< one-sided limits from below (extrapolated from T < T_c)
    ThermoPoint tc_plus;   ///< one-sided limits from above
    double cv_jump() const { return tc_minus.cv - tc_plus.cv; }
};

/// S and C_V at `temperatures` from samples of `omega`, plus one-sided limits at tc.
///
/// Central differences where the stencil stays on one side of tc, one-sided four-point
/// stencils otherwise; each derivative is Richardson-combined over steps h and 2h when
/// `richardson` is set. Throws StencilError for samples inside (tc - h, tc + h) or
/// stencils reaching T <= 0.
ThermoCurve entropy_and_cv(const std::function<double(double)>& omega, std::span<const double> temperatures,
                           double tc, double h, bool richardson = true, int threads = 1);

}  // namespace gapeq
