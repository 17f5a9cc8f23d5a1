#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gapeq {

/// Argument outside the domain where a quantity is defined (e.g. T <= 0, x outside [eps, hbar*omega_D]).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Physical parameters or couplings that admit no solution.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Integrand returned a non-finite value.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, double abscissa)
        : std::runtime_error(what), abscissa_(abscissa) {}
    double abscissa() const noexcept { return abscissa_; }

private:
    double abscissa_;
};

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, std::vector<double> residual_history)
        : std::runtime_error(what), history_(std::move(residual_history)) {}
    const std::vector<double>& residual_history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

/// A proven property of the continuous problem failed at the discrete level.
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Finite-difference stencil cannot be placed (too close to T_c or to T = 0).
class StencilError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gapeq
