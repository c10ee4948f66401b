#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bfbm/kernels.hpp"

namespace bfbm::simulate {

enum class Method { Cholesky, Decomposition, H1Series };

// Named, reproducible generator: same seed + algorithm => bit-identical
// draws.  Only "mt19937_64-box-muller" is implemented; the explicit
// Box-Muller mapping is pinned down here because the standard library leaves
// std::normal_distribution's algorithm unspecified.
struct RngSpec {
    std::uint64_t seed = 0;
    std::string algorithm = "mt19937_64-box-muller";
};

class NormalStream {
  public:
    explicit NormalStream(const RngSpec& spec);
    // u1 = ((e() >> 11) + 1) * 2^-53 in (0,1], u2 = (e() >> 11) * 2^-53 in [0,1);
    // returns sqrt(-2 ln u1) cos(2 pi u2), caches the sin twin.
    double next();

  private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// Stream splitting for parallel path generation: splitmix64 scramble of
// (base, index), so serial and parallel runs agree path-by-path.
std::uint64_t derive_stream_seed(std::uint64_t base, std::uint64_t index);

struct PathSample {
    std::vector<double> times;   // strictly increasing
    std::vector<double> values;  // values[i] at times[i]
    Method method;
    std::uint64_t seed;  // effective stream seed for this path
    kernels::Params params;
};

// Gaussian path with the exact covariance of `kid` via lower Cholesky.
// `jitter` (relative to the max diagonal) is added up front; the internal
// ladder up to 1e-8 still applies on top.  Times with zero variance (t = 0)
// are pinned to value 0 and excluded from the factorization.
PathSample sample_cholesky(kernels::KernelId kid, const kernels::Params& p,
                           const std::vector<double>& times, const RngSpec& rng,
                           double jitter = 0.0);
std::vector<PathSample> sample_cholesky_paths(kernels::KernelId kid,
                                              const kernels::Params& p,
                                              const std::vector<double>& times,
                                              const RngSpec& rng, std::size_t n_paths,
                                              double jitter = 0.0);

// Log-r discretization grid for the subordinator-style integral underlying
// the Lei-Nualart component.  r_lo = 0 picks the cutoff adaptively from the
// time horizon so the truncated low-frequency mass is below 1e-10.  The
// log-midpoint rule carries a relative covariance bias of order
// (log(r_hi/r_lo) / cells)^2 / 24, about 1e-4 at the defaults.
struct LnGridConfig {
    std::size_t cells = 2000;
    double r_lo = 0.0;
    double r_hi = 1e10;
};

// Additive decomposition for 1 < K < 2, 0 < HK <= 1: independent
// c1 * X0(|t|^{2H}) + c2 * W^{HK}(t) with c1 = sqrt(K(K-1)/(2^K Gamma(2-K))),
// c2 = sqrt(2^{1-K}).
PathSample sample_decomposition(const kernels::Params& p, const std::vector<double>& times,
                                const RngSpec& rng, const LnGridConfig& grid = {});
std::vector<PathSample> sample_decomposition_paths(const kernels::Params& p,
                                                   const std::vector<double>& times,
                                                   const RngSpec& rng, std::size_t n_paths,
                                                   const LnGridConfig& grid = {});

// The two scaled summands (and their sum) from one stream, for independence
// diagnostics: sum.values[i] = x0_part.values[i] + fbm_part.values[i].
struct DecompositionParts {
    PathSample x0_part;
    PathSample fbm_part;
    PathSample sum;
};
DecompositionParts sample_decomposition_parts(const kernels::Params& p,
                                              const std::vector<double>& times,
                                              const RngSpec& rng,
                                              const LnGridConfig& grid = {});

// Deterministic covariance of the discretized X0 component (before the c1
// scaling), for grid-quality diagnostics against the closed form.
double x0_grid_cov(const kernels::Params& p, double s, double t,
                   const LnGridConfig& grid = {});

// H = 1 boundary series for 0 < K < 1.  Term n >= 1 contributes an
// independent Gaussian vector with covariance
//   T_n(s,t) = c (2st)^n / n! * Gamma(n-K) / (s^2+t^2)^{n-K},
//   c = K / (2^K Gamma(1-K)),
// sampled exactly via a per-term PSD factorization; the series is cut at
// n_terms.  Throws TruncationError when the first omitted term's variance
// exceeds 1e-4 of the process variance (the ratio is time-independent).
// n_terms = 0 is the empty sum: a deterministic zero path.
PathSample sample_h1_series(double k, const std::vector<double>& times, const RngSpec& rng,
                            std::size_t n_terms = 800);
std::vector<PathSample> sample_h1_series_paths(double k, const std::vector<double>& times,
                                               const RngSpec& rng, std::size_t n_paths,
                                               std::size_t n_terms = 800);

// Exact covariance of the truncated H = 1 series (the law the sampler
// actually draws from) and the relative omitted-tail variance
// Gamma(N+1-K) / (Gamma(1-K) Gamma(N+1)).
double h1_series_cov(double k, double s, double t, std::size_t n_terms);
double h1_series_tail_fraction(double k, std::size_t n_terms);

// Unbiased sample covariance of values[i] vs values[j] across paths sharing
// one time grid.
double empirical_cov(const std::vector<PathSample>& paths, std::size_t i, std::size_t j);

}  // namespace bfbm::simulate
