#pragma once

#include <stdexcept>
#include <string>

namespace bfbm {

// Invalid argument or parameter outside the range a formula is defined on.
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

// Gamma evaluated at a non-positive integer.
struct PoleError : DomainError {
    explicit PoleError(const std::string& msg) : DomainError(msg) {}
};

// A series or iteration did not reach its tolerance within the term budget.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical integration could not meet its accuracy target.
struct QuadratureError : std::runtime_error {
    explicit QuadratureError(const std::string& msg) : std::runtime_error(msg) {}
};

// A parameter scan produced non-finite values.
struct ScanError : std::runtime_error {
    explicit ScanError(const std::string& msg) : std::runtime_error(msg) {}
};

// The single-crossing assumption of a bisection was contradicted post hoc.
struct NonMonotoneError : std::runtime_error {
    explicit NonMonotoneError(const std::string& msg) : std::runtime_error(msg) {}
};

// An eigensolver or other numerical kernel failed to converge.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Series truncation would bias the sampled law beyond the accepted budget.
struct TruncationError : std::runtime_error {
    explicit TruncationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Cholesky factorization failed after the jitter ladder. `minor_index` is the
// 0-based index of the first leading principal minor with a non-positive
// pivot; for covariance matrices this is a finite-dimensional witness of
// non-positive-definiteness.
struct NotPSDError : std::runtime_error {
    int minor_index;
    NotPSDError(const std::string& msg, int minor)
        : std::runtime_error(msg), minor_index(minor) {}
};

}  // namespace bfbm
