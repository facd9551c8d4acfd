#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fracfund {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user input: configuration values, schedules, out-of-range parameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An operation was called outside its domain (singular point, grid mismatch, empty ball).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Numerical procedure failed to reach its target accuracy.
class NumericFailure : public Error {
public:
    NumericFailure(const std::string& what, double achieved)
        : Error(what), achieved_(achieved) {}

    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// Conjugate gradient exhausted its iteration budget.
class NonConvergence : public NumericFailure {
public:
    NonConvergence(const std::string& what, std::vector<double> history)
        : NumericFailure(what, history.empty() ? 1.0 : history.back()),
          history_(std::move(history)) {}

    const std::vector<double>& residual_history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

/// Negative curvature met inside CG: the operator is not positive definite,
/// which can only come from a broken assembly.
class AssemblyError : public NumericFailure {
public:
    AssemblyError(const std::string& what, double curvature)
        : NumericFailure(what, curvature) {}
};

}  // namespace fracfund
