#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace freespec {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates an operation's precondition
/// (dimension mismatch, T < N, n_bins < 2, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A transform was evaluated outside its domain, e.g. Im z <= 0.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A row has zero variance and cannot be standardized.
class DegenerateRowError : public Error {
public:
    DegenerateRowError(std::size_t row, const std::string& what);
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// A matrix that must be inverted is too ill-conditioned.
class ConditioningError : public Error {
public:
    ConditioningError(double condition, const std::string& what);
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// An iteration ran out of budget before reaching its tolerance.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(double residual, long iterations, const std::string& what);
    double residual() const noexcept { return residual_; }
    long iterations() const noexcept { return iterations_; }

private:
    double residual_;
    long iterations_;
};

/// A Cauchy transform value lost the Herglotz sign property (Im G must be
/// negative definite on the upper half-plane).
class HerglotzViolation : public Error {
public:
    using Error::Error;
};

/// The requested analysis is undefined for this input, e.g. fault
/// location when no outliers were found.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A spectral density cannot be used for detection (no support).
class InvalidAsdError : public Error {
public:
    using Error::Error;
};

}  // namespace freespec
