#pragma once

#include <stdexcept>
#include <string>

namespace gosset {

/// Rejected input: bad parameters, malformed files, inconsistent options.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (no convergence, divergent configuration).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature exhausted its subdivision budget.
class QuadratureError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The observed volatility ratio has no preimage on the calibration curve.
class NoSolutionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Ratio-uncertainty propagation produced a negative variance.
class NegativeVarianceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Malformed or unreadable input file. Carries the 1-based line number when known.
class InputError : public ValidationError {
public:
    InputError(const std::string& what, std::size_t line = 0)
        : ValidationError(line ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace gosset
