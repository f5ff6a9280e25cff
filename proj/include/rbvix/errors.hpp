#pragma once

#include <stdexcept>
#include <string>

namespace rbvix {

/// Invalid arguments, violated preconditions or unsupported parameter combinations.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure did not reach its accuracy target (series, quadrature, factorization).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FactorizationError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Analytic constants requested outside the hypotheses that make them valid
/// (e.g. the strong-error constant for H >= 1/2 or a non-flat initial curve).
class UnsupportedHypothesis : public UsageError {
public:
    using UsageError::UsageError;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rbvix
