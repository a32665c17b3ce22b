#pragma once

#include <stdexcept>
#include <string>

namespace delspec {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Configuration, schema and expression-syntax problems (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

/// Numerical failures: singular operators, eigensolver breakdown,
/// integrator overflow (CLI exit code 3).
struct NumericalError : Error {
    using Error::Error;
};

/// Expression evaluation hit a domain error (division by zero, sqrt of a
/// negative number, non-finite result).
struct ExprDomainError : Error {
    using Error::Error;
};

/// (I - U2) is singular to working tolerance; carries the condition estimate.
struct SingularOperatorError : NumericalError {
    double condition_estimate;
    SingularOperatorError(const std::string& what, double cond)
        : NumericalError(what), condition_estimate(cond) {}
};

}  // namespace delspec
