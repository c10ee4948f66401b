#pragma once

#include <cstddef>
#include <vector>

namespace bfbm::linalg {

// Dense symmetric matrices are stored row-major as n*n doubles.  The sizes
// used by this library are small (path grids and PSD probes, n <= 4096), so
// the implementations favour determinism and clarity over blocking.

struct CholeskyResult {
    std::vector<double> factor;  // lower-triangular L with A + jitter*I = L L^T
    double jitter = 0.0;         // diagonal shift actually applied
};

// Lower Cholesky factorization with a jitter ladder.  Tries shifts
// {0, 1e-14, 1e-12, 1e-10, 1e-8} * max diagonal entry and returns the first
// that succeeds; throws NotPSDError (carrying the 0-based index of the first
// failing pivot at the largest shift) if none does.
CholeskyResult cholesky_with_jitter(const std::vector<double>& a, std::size_t n);

// Smallest eigenvalue of a symmetric matrix: Householder reduction to
// tridiagonal form, then Sturm-sequence bisection between Gershgorin bounds.
// O(n^3); intended for PSD probes, not large-scale eigenproblems.
double smallest_eigenvalue_symmetric(std::vector<double> a, std::size_t n);

}  // namespace bfbm::linalg
