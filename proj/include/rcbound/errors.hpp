// errors.hpp: exception types shared by all rcbound modules

#pragma once

#include <stdexcept>
#include <string>

namespace rcbound {

/// Argument outside the mathematical domain of an operation (pole on an
/// interval endpoint, non-positive frequency for n(ω), ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A quantity that diverges at the requested point (bar-f on a band edge).
class DivergenceError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Tabulated data queried outside its sample hull.
class EvaluationError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Numerical routine failed to reach its tolerance. Carries the best estimate.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, double best_estimate, double error_estimate)
        : std::runtime_error(what), best_(best_estimate), error_(error_estimate) {}

    double best_estimate() const noexcept { return best_; }
    double error_estimate() const noexcept { return error_; }

private:
    double best_;
    double error_;
};

/// Operation called in a state where its result is undefined (e.g. ω_b without a bound state).
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Invalid user configuration or model setup.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Fixed-step integrator drifted beyond its trace budget.
class StepSizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Should-not-happen failure of an algorithm whose preconditions were met.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace rcbound
