#pragma once

#include <complex>

#include "bfbm/errors.hpp"

namespace bfbm::special {

using Complex = std::complex<double>;

// A quantity carried in log scale to avoid overflow/underflow.
struct LogModulus {
    double log_value;
    double value() const { return std::exp(log_value); }
};

// log Gamma(z), continuous on the plane cut along the negative reals.
// Lanczos approximation (g = 7, 9 coefficients) for Re z > 0.5, upward
// recurrence log Gamma(z) = log Gamma(z+n) - sum_k log(z+k) otherwise.
// Throws PoleError at z = 0, -1, -2, ... and DomainError on non-finite z.
Complex log_gamma(Complex z);

// log |Gamma(z)|^2 = 2 Re log Gamma(z).  Conjugation-invariant bit for bit.
LogModulus log_abs_gamma_sq(Complex z);

// log cosh(x) = |x| - log 2 + log1p(e^{-2|x|}); exact for large |x|.
LogModulus log_cosh(double x);

// log sinh(x) = x - log 2 + log1p(-e^{-2x}) for x > 0; DomainError otherwise.
LogModulus log_sinh(double x);

}  // namespace bfbm::special
