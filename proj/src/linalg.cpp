#include "bfbm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bfbm/errors.hpp"

namespace bfbm::linalg {

namespace {

void validate_square(const std::vector<double>& a, std::size_t n) {
    if (n == 0) throw DomainError("matrix size must be positive");
    if (n > 4096) throw DomainError("matrix size exceeds the supported cap of 4096");
    if (a.size() != n * n) throw DomainError("matrix storage does not match its size");
    for (double v : a) {
        if (!std::isfinite(v)) throw DomainError("matrix entries must be finite");
    }
}

// Attempt an in-place lower Cholesky of a + shift*I.  On success fills
// `factor`; on failure returns the 0-based index of the offending pivot.
int try_cholesky(const std::vector<double>& a, std::size_t n, double shift,
                 std::vector<double>& factor) {
    factor.assign(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j] + shift;
        for (std::size_t k = 0; k < j; ++k) d -= factor[j * n + k] * factor[j * n + k];
        if (!(d > 0.0) || !std::isfinite(d)) return static_cast<int>(j);
        const double root = std::sqrt(d);
        factor[j * n + j] = root;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= factor[i * n + k] * factor[j * n + k];
            factor[i * n + j] = s / root;
        }
    }
    return -1;
}

// Reduce symmetric a (destroyed) to tridiagonal form; diag in d, subdiagonal
// in e (e[i] couples rows i and i+1).  Plain Householder similarity
// transforms: for each column build v from the below-diagonal part and apply
// B <- B - 2 v w^T - 2 w v^T with p = B v, w = p - (v^T p) v.
void tridiagonalize(std::vector<double>& a, std::size_t n, std::vector<double>& d,
                    std::vector<double>& e) {
    d.assign(n, 0.0);
    e.assign(n > 0 ? n - 1 : 0, 0.0);
    std::vector<double> v(n), p(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t m = n - k - 1;  // trailing block size
        double norm_sq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            v[i] = a[(k + 1 + i) * n + k];
            norm_sq += v[i] * v[i];
        }
        const double norm = std::sqrt(norm_sq);
        if (norm == 0.0) {
            e[k] = 0.0;
            continue;
        }
        const double alpha = v[0] >= 0.0 ? -norm : norm;
        e[k] = alpha;
        v[0] -= alpha;
        double v_sq = 0.0;
        for (std::size_t i = 0; i < m; ++i) v_sq += v[i] * v[i];
        const double inv = 1.0 / std::sqrt(v_sq);
        for (std::size_t i = 0; i < m; ++i) v[i] *= inv;

        double beta = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            const std::size_t row = (k + 1 + i) * n + k + 1;
            for (std::size_t j = 0; j < m; ++j) s += a[row + j] * v[j];
            p[i] = s;
            beta += v[i] * s;
        }
        for (std::size_t i = 0; i < m; ++i) p[i] -= beta * v[i];
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t row = (k + 1 + i) * n + k + 1;
            for (std::size_t j = 0; j < m; ++j) {
                a[row + j] -= 2.0 * (v[i] * p[j] + p[i] * v[j]);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i * n + i];
    if (n >= 2) e[n - 2] = a[(n - 1) * n + n - 2];
}

// Number of eigenvalues of the tridiagonal (d, e) strictly below x, from the
// signs of the LDL^T pivots of T - xI (Sylvester's law of inertia).
std::size_t count_below(const std::vector<double>& d, const std::vector<double>& e,
                        double x) {
    const double pivmin = std::numeric_limits<double>::min() /
                          std::numeric_limits<double>::epsilon();
    std::size_t count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double off_sq = i == 0 ? 0.0 : e[i - 1] * e[i - 1];
        q = d[i] - x - off_sq / q;
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

}  // namespace

CholeskyResult cholesky_with_jitter(const std::vector<double>& a, std::size_t n) {
    validate_square(a, n);
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a[i * n + i]));
    if (max_diag == 0.0) max_diag = 1.0;

    static constexpr double kLadder[] = {0.0, 1e-14, 1e-12, 1e-10, 1e-8};
    CholeskyResult result;
    int bad = -1;
    for (double rung : kLadder) {
        const double shift = rung * max_diag;
        bad = try_cholesky(a, n, shift, result.factor);
        if (bad < 0) {
            result.jitter = shift;
            return result;
        }
    }
    throw NotPSDError("matrix is not positive definite: pivot " + std::to_string(bad) +
                          " remained non-positive after the jitter ladder",
                      bad);
}

double smallest_eigenvalue_symmetric(std::vector<double> a, std::size_t n) {
    validate_square(a, n);
    std::vector<double> d, e;
    tridiagonalize(a, n, d, e);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) +
                         (i + 1 < n ? std::abs(e[i]) : 0.0);
        lo = std::min(lo, d[i] - r);
        hi = std::max(hi, d[i] + r);
    }
    if (lo == hi) return lo;

    const double eps = std::numeric_limits<double>::epsilon();
    const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    for (int it = 0; it < 200 && hi - lo > 4.0 * eps * scale; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(d, e, mid) >= 1) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace bfbm::linalg
