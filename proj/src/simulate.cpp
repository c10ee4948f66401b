#include "bfbm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "bfbm/errors.hpp"
#include "bfbm/linalg.hpp"

namespace bfbm::simulate {

namespace {

constexpr std::size_t kMaxTimes = 4096;
constexpr double kTruncationBudget = 1e-4;

void validate_times(const std::vector<double>& times) {
    if (times.empty()) throw DomainError("simulate: times must be nonempty");
    if (times.size() > kMaxTimes)
        throw DomainError("simulate: at most 4096 time points are supported");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i])) throw DomainError("simulate: times must be finite");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw DomainError("simulate: times must be strictly increasing");
    }
}

void validate_rng(const RngSpec& spec) {
    if (spec.algorithm != "mt19937_64-box-muller")
        throw DomainError("RngSpec: unknown algorithm \"" + spec.algorithm +
                          "\" (only \"mt19937_64-box-muller\" is implemented)");
}

RngSpec stream_spec(const RngSpec& base, std::size_t index) {
    return RngSpec{derive_stream_seed(base.seed, index), base.algorithm};
}

// Shared plan for Cholesky-based sampling: the Gram matrix over the times
// with nonzero variance is factored once, paths only pay an L z product.
// Every supported kernel has R(0,0) = 0, so t = 0 is pinned to value 0 and
// excluded from the factorization (it would make the Gram singular).
struct CholPlan {
    std::vector<double> chol;        // m x m lower factor, row-major
    std::vector<std::size_t> active; // factor row -> index into times
    std::size_t n = 0;               // times.size()
};

CholPlan make_chol_plan(kernels::KernelId kid, const kernels::Params& p,
                        const std::vector<double>& times, double jitter) {
    validate_times(times);
    if (!(std::isfinite(jitter) && jitter >= 0.0))
        throw DomainError("sample_cholesky: jitter must be finite and >= 0");
    if (kid == kernels::KernelId::BfBm && p.classify() == kernels::ParamClass::Forbidden)
        throw DomainError("sample_cholesky: (h, k) violates a necessary existence condition");

    CholPlan plan;
    plan.n = times.size();
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] != 0.0) plan.active.push_back(i);
    const std::size_t m = plan.active.size();
    if (m == 0) return plan;

    std::vector<double> g(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            const double v =
                kernels::kernel_value(kid, p, times[plan.active[i]], times[plan.active[j]]);
            g[i * m + j] = v;
            g[j * m + i] = v;
        }
    if (jitter > 0.0) {
        double max_diag = 0.0;
        for (std::size_t i = 0; i < m; ++i) max_diag = std::max(max_diag, g[i * m + i]);
        if (max_diag == 0.0) max_diag = 1.0;
        for (std::size_t i = 0; i < m; ++i) g[i * m + i] += jitter * max_diag;
    }
    plan.chol = linalg::cholesky_with_jitter(g, m).factor;
    return plan;
}

PathSample draw_chol_path(const CholPlan& plan, const std::vector<double>& times,
                          Method method, const kernels::Params& p, const RngSpec& spec) {
    NormalStream stream(spec);
    const std::size_t m = plan.active.size();
    std::vector<double> z(m);
    for (std::size_t i = 0; i < m; ++i) z[i] = stream.next();
    std::vector<double> values(times.size(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= i; ++j) acc += plan.chol[i * m + j] * z[j];
        values[plan.active[i]] = acc;
    }
    return PathSample{times, std::move(values), method, spec.seed, p};
}

// Log-r grid for X0(sigma) = int_0^inf (1 - e^{-r sigma}) r^{-(1+K)/2} W(dr):
// cell variance int r^{-1-K} dr, kernel frozen at the geometric midpoint.
struct X0Grid {
    std::vector<double> rbar;
    std::vector<double> sqrt_v;
};

X0Grid make_x0_grid(double k, double sigma_max, const LnGridConfig& grid) {
    if (grid.cells < 2 || grid.cells > 200000)
        throw DomainError("LnGridConfig: cells must be in [2, 200000]");
    if (!(std::isfinite(grid.r_lo) && std::isfinite(grid.r_hi) && grid.r_lo >= 0.0))
        throw DomainError("LnGridConfig: requires finite r_hi > r_lo >= 0");
    double r_lo = grid.r_lo;
    if (r_lo == 0.0) {
        // mass truncated below r_lo is ~ sigma_max^2 r_lo^{2-K} / (2-K); aim at
        // 1e-10, but keep r^{-K} representable (the cap only binds for K -> 2).
        r_lo = sigma_max > 0.0 ? std::pow((2.0 - k) * 1e-10 / (sigma_max * sigma_max),
                                          1.0 / (2.0 - k))
                               : 1e-10;
        r_lo = std::clamp(r_lo, 1e-150, 1e-2);
    }
    if (!(grid.r_hi > r_lo)) throw DomainError("LnGridConfig: requires r_hi > r_lo");

    const double step = std::log(grid.r_hi / r_lo) / static_cast<double>(grid.cells);
    X0Grid out;
    out.rbar.resize(grid.cells);
    out.sqrt_v.resize(grid.cells);
    for (std::size_t c = 0; c < grid.cells; ++c) {
        const double lo = r_lo * std::exp(static_cast<double>(c) * step);
        // int_lo^hi r^{-1-K} dr = lo^{-K} (1 - e^{-K step}) / K, cancellation-free
        const double v = std::pow(lo, -k) * (-std::expm1(-k * step)) / k;
        out.rbar[c] = lo * std::exp(0.5 * step);
        out.sqrt_v[c] = std::sqrt(v);
    }
    return out;
}

void validate_decomposition_params(const kernels::Params& p) {
    if (!(p.k > 1.0 && p.k < 2.0))
        throw DomainError("sample_decomposition: requires 1 < k < 2");
    if (!(p.h * p.k > 0.0 && p.h * p.k <= 1.0))
        throw DomainError("sample_decomposition: requires 0 < h*k <= 1");
}

struct DecompPlan {
    std::vector<double> times;
    std::vector<double> weights = {};  // times.size() x cells: -expm1(-rbar sigma_j) sqrt_v
    std::size_t cells = 0;
    CholPlan fbm = {};                 // W^{HK} factor over the same times
    double c1 = 0.0;                   // sqrt(K(K-1) / (2^K Gamma(2-K)))
    double c2 = 0.0;                   // sqrt(2^{1-K})
    kernels::Params p;
};

DecompPlan make_decomp_plan(const kernels::Params& p, const std::vector<double>& times,
                            const LnGridConfig& grid) {
    validate_times(times);
    validate_decomposition_params(p);
    DecompPlan plan{.times = times, .p = p};

    std::vector<double> sigma(times.size());
    double sigma_max = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
        sigma[j] = std::pow(std::abs(times[j]), 2.0 * p.h);
        sigma_max = std::max(sigma_max, sigma[j]);
    }
    const X0Grid x0 = make_x0_grid(p.k, sigma_max, grid);
    plan.cells = x0.rbar.size();
    plan.weights.resize(times.size() * plan.cells);
    for (std::size_t j = 0; j < times.size(); ++j)
        for (std::size_t c = 0; c < plan.cells; ++c)
            plan.weights[j * plan.cells + c] = -std::expm1(-x0.rbar[c] * sigma[j]) * x0.sqrt_v[c];

    plan.fbm = make_chol_plan(kernels::KernelId::FBm, kernels::Params(p.h * p.k, 1.0), times, 0.0);
    plan.c1 = std::exp(0.5 * (std::log(p.k) + std::log(p.k - 1.0) -
                              p.k * std::numbers::ln2 - std::lgamma(2.0 - p.k)));
    plan.c2 = std::exp2(0.5 * (1.0 - p.k));
    return plan;
}

}  // namespace

NormalStream::NormalStream(const RngSpec& spec) : engine_(spec.seed) { validate_rng(spec); }

double NormalStream::next() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    // u1 in (0,1] so log never sees 0; u2 in [0,1)
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

std::uint64_t derive_stream_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 scramble of the (base, index) pair
    std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

PathSample sample_cholesky(kernels::KernelId kid, const kernels::Params& p,
                           const std::vector<double>& times, const RngSpec& rng,
                           double jitter) {
    validate_rng(rng);
    const CholPlan plan = make_chol_plan(kid, p, times, jitter);
    return draw_chol_path(plan, times, Method::Cholesky, p, rng);
}

std::vector<PathSample> sample_cholesky_paths(kernels::KernelId kid, const kernels::Params& p,
                                              const std::vector<double>& times,
                                              const RngSpec& rng, std::size_t n_paths,
                                              double jitter) {
    validate_rng(rng);
    const CholPlan plan = make_chol_plan(kid, p, times, jitter);
    std::vector<PathSample> paths;
    paths.reserve(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i)
        paths.push_back(draw_chol_path(plan, times, Method::Cholesky, p, stream_spec(rng, i)));
    return paths;
}

namespace {

DecompositionParts draw_decomposition(const DecompPlan& plan, const RngSpec& spec) {
    NormalStream stream(spec);
    const std::size_t n = plan.times.size();

    // X0 normals first, then the fBm normals, in one fixed order
    std::vector<double> z(plan.cells);
    for (std::size_t c = 0; c < plan.cells; ++c) z[c] = stream.next();
    std::vector<double> x0(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        const double* w = &plan.weights[j * plan.cells];
        for (std::size_t c = 0; c < plan.cells; ++c) acc += w[c] * z[c];
        x0[j] = plan.c1 * acc;
    }

    const std::size_t m = plan.fbm.active.size();
    std::vector<double> zf(m);
    for (std::size_t i = 0; i < m; ++i) zf[i] = stream.next();
    std::vector<double> fbm(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= i; ++j) acc += plan.fbm.chol[i * m + j] * zf[j];
        fbm[plan.fbm.active[i]] = plan.c2 * acc;
    }

    std::vector<double> sum(n);
    for (std::size_t j = 0; j < n; ++j) sum[j] = x0[j] + fbm[j];

    DecompositionParts parts{
        PathSample{plan.times, std::move(x0), Method::Decomposition, spec.seed, plan.p},
        PathSample{plan.times, std::move(fbm), Method::Decomposition, spec.seed, plan.p},
        PathSample{plan.times, std::move(sum), Method::Decomposition, spec.seed, plan.p}};
    return parts;
}

}  // namespace

PathSample sample_decomposition(const kernels::Params& p, const std::vector<double>& times,
                                const RngSpec& rng, const LnGridConfig& grid) {
    validate_rng(rng);
    const DecompPlan plan = make_decomp_plan(p, times, grid);
    return draw_decomposition(plan, rng).sum;
}

std::vector<PathSample> sample_decomposition_paths(const kernels::Params& p,
                                                   const std::vector<double>& times,
                                                   const RngSpec& rng, std::size_t n_paths,
                                                   const LnGridConfig& grid) {
    validate_rng(rng);
    const DecompPlan plan = make_decomp_plan(p, times, grid);
    std::vector<PathSample> paths;
    paths.reserve(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i)
        paths.push_back(draw_decomposition(plan, stream_spec(rng, i)).sum);
    return paths;
}

DecompositionParts sample_decomposition_parts(const kernels::Params& p,
                                              const std::vector<double>& times,
                                              const RngSpec& rng, const LnGridConfig& grid) {
    validate_rng(rng);
    const DecompPlan plan = make_decomp_plan(p, times, grid);
    return draw_decomposition(plan, rng);
}

double x0_grid_cov(const kernels::Params& p, double s, double t, const LnGridConfig& grid) {
    if (!(p.k > 1.0 && p.k < 2.0)) throw DomainError("x0_grid_cov: requires 1 < k < 2");
    if (!(std::isfinite(s) && std::isfinite(t)))
        throw DomainError("x0_grid_cov: times must be finite");
    const double ss = std::pow(std::abs(s), 2.0 * p.h);
    const double st = std::pow(std::abs(t), 2.0 * p.h);
    const X0Grid x0 = make_x0_grid(p.k, std::max(ss, st), grid);
    double acc = 0.0;
    for (std::size_t c = 0; c < x0.rbar.size(); ++c) {
        const double v = x0.sqrt_v[c] * x0.sqrt_v[c];
        acc += std::expm1(-x0.rbar[c] * ss) * std::expm1(-x0.rbar[c] * st) * v;
    }
    return acc;
}

namespace {

void validate_h1(double k, const std::vector<double>& times, std::size_t n_terms) {
    if (!(std::isfinite(k) && k > 0.0 && k < 1.0))
        throw DomainError("sample_h1_series: requires 0 < k < 1");
    validate_times(times);
    if (!(times.front() > 0.0))
        throw DomainError("sample_h1_series: times must be strictly positive");
    if (n_terms > 1000000) throw DomainError("sample_h1_series: n_terms too large");
}

// First omitted term's variance relative to the (time-independent) process
// variance ratio: K Gamma(N+1-K) / (Gamma(1-K) Gamma(N+2)).
double h1_first_omitted_fraction(double k, std::size_t n_terms) {
    const double n = static_cast<double>(n_terms);
    return std::exp(std::log(k) + std::lgamma(n + 1.0 - k) - std::lgamma(1.0 - k) -
                    std::lgamma(n + 2.0));
}

void check_h1_truncation(double k, std::size_t n_terms) {
    const double frac = h1_first_omitted_fraction(k, n_terms);
    if (frac > kTruncationBudget)
        throw TruncationError(
            "sample_h1_series: omitted-term variance fraction " + std::to_string(frac) +
            " exceeds the 1e-4 budget; increase n_terms");
}

// Lower Cholesky tolerant of semidefinite input: a pivot below the clamp
// threshold zeroes its whole column instead of failing.  The per-term
// matrices are exact Gaussian covariances, so non-positive pivots are
// roundoff-level and the induced bias is O(eps * max diagonal).
std::vector<double> psd_cholesky_clamped(const std::vector<double>& a, std::size_t n) {
    constexpr double kClampEps = 1e-14;
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a[i * n + i]);
    const double clamp = kClampEps * max_diag;

    std::vector<double> l(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t t = 0; t < j; ++t) d -= l[j * n + t] * l[j * n + t];
        if (!(d > clamp)) continue;  // column adds nothing at working precision
        const double root = std::sqrt(d);
        l[j * n + j] = root;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t t = 0; t < j; ++t) s -= l[i * n + t] * l[j * n + t];
            l[i * n + j] = s / root;
        }
    }
    return l;
}

// log T_n(i,j) with T_n(s,t) = c (2st)^n / n! * Gamma(n-K) / (s^2+t^2)^{n-K},
// c = K / (2^K Gamma(1-K)); built in log scale, so large n and wide time
// ranges stay representable.
struct H1Plan {
    std::vector<double> times;
    std::vector<std::vector<double>> factors;  // one m x m lower factor per term
    double k = 0.0;
};

H1Plan make_h1_plan(double k, const std::vector<double>& times, std::size_t n_terms) {
    validate_h1(k, times, n_terms);
    if (n_terms > 0) check_h1_truncation(k, n_terms);

    H1Plan plan{.times = times, .factors = {}, .k = k};
    const std::size_t m = times.size();
    const double log_c = std::log(k) - k * std::numbers::ln2 - std::lgamma(1.0 - k);

    std::vector<double> log_2st(m * m), log_s2t2(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            const double si = times[i], sj = times[j];
            log_2st[i * m + j] = std::log(2.0 * si * sj);
            log_s2t2[i * m + j] = std::log(si * si + sj * sj);
        }

    std::vector<double> a(m * m);
    double log_fact = 0.0;                    // log n!
    double log_gnk = std::lgamma(1.0 - k);    // log Gamma(n - k)
    plan.factors.reserve(n_terms);
    for (std::size_t n = 1; n <= n_terms; ++n) {
        const double nd = static_cast<double>(n);
        log_fact += std::log(nd);
        if (n >= 2) log_gnk += std::log(nd - 1.0 - k);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j) {
                const double lt = log_c + nd * log_2st[i * m + j] - log_fact + log_gnk -
                                  (nd - k) * log_s2t2[i * m + j];
                const double v = std::exp(lt);
                a[i * m + j] = v;
                a[j * m + i] = v;
            }
        plan.factors.push_back(psd_cholesky_clamped(a, m));
    }
    return plan;
}

PathSample draw_h1_path(const H1Plan& plan, const RngSpec& spec) {
    NormalStream stream(spec);
    const std::size_t m = plan.times.size();
    std::vector<double> values(m, 0.0);
    std::vector<double> z(m);
    for (const auto& l : plan.factors) {
        // all m normals are consumed per term, so clamped columns do not
        // shift the stream alignment
        for (std::size_t i = 0; i < m; ++i) z[i] = stream.next();
        for (std::size_t i = 0; i < m; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j <= i; ++j) acc += l[i * m + j] * z[j];
            values[i] += acc;
        }
    }
    return PathSample{plan.times, std::move(values), Method::H1Series, spec.seed,
                      kernels::Params(1.0, plan.k)};
}

}  // namespace

PathSample sample_h1_series(double k, const std::vector<double>& times, const RngSpec& rng,
                            std::size_t n_terms) {
    validate_rng(rng);
    const H1Plan plan = make_h1_plan(k, times, n_terms);
    return draw_h1_path(plan, rng);
}

std::vector<PathSample> sample_h1_series_paths(double k, const std::vector<double>& times,
                                               const RngSpec& rng, std::size_t n_paths,
                                               std::size_t n_terms) {
    validate_rng(rng);
    const H1Plan plan = make_h1_plan(k, times, n_terms);
    std::vector<PathSample> paths;
    paths.reserve(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i)
        paths.push_back(draw_h1_path(plan, stream_spec(rng, i)));
    return paths;
}

double h1_series_cov(double k, double s, double t, std::size_t n_terms) {
    if (!(std::isfinite(k) && k > 0.0 && k < 1.0))
        throw DomainError("h1_series_cov: requires 0 < k < 1");
    if (!(s > 0.0 && t > 0.0 && std::isfinite(s) && std::isfinite(t)))
        throw DomainError("h1_series_cov: requires finite s, t > 0");
    if (n_terms > 1000000) throw DomainError("h1_series_cov: n_terms too large");
    const double log_c = std::log(k) - k * std::numbers::ln2 - std::lgamma(1.0 - k);
    const double log_2st = std::log(2.0 * s * t);
    const double log_s2t2 = std::log(s * s + t * t);
    double acc = 0.0;
    double log_fact = 0.0;
    double log_gnk = std::lgamma(1.0 - k);
    for (std::size_t n = 1; n <= n_terms; ++n) {
        const double nd = static_cast<double>(n);
        log_fact += std::log(nd);
        if (n >= 2) log_gnk += std::log(nd - 1.0 - k);
        acc += std::exp(log_c + nd * log_2st - log_fact + log_gnk - (nd - k) * log_s2t2);
    }
    return acc;
}

double h1_series_tail_fraction(double k, std::size_t n_terms) {
    if (!(std::isfinite(k) && k > 0.0 && k < 1.0))
        throw DomainError("h1_series_tail_fraction: requires 0 < k < 1");
    if (n_terms == 0) return 1.0;
    const double n = static_cast<double>(n_terms);
    // telescoped tail: sum_{n > N} Gamma(n-K)/Gamma(n+1) = Gamma(N+1-K)/(K Gamma(N+1))
    return std::exp(std::lgamma(n + 1.0 - k) - std::lgamma(1.0 - k) - std::lgamma(n + 1.0));
}

double empirical_cov(const std::vector<PathSample>& paths, std::size_t i, std::size_t j) {
    if (paths.size() < 2) throw DomainError("empirical_cov: needs at least 2 paths");
    const std::vector<double>& grid = paths.front().times;
    if (i >= grid.size() || j >= grid.size())
        throw DomainError("empirical_cov: index out of range");
    for (const PathSample& p : paths)
        if (p.times != grid) throw DomainError("empirical_cov: paths must share one time grid");

    const double n = static_cast<double>(paths.size());
    double mi = 0.0, mj = 0.0;
    for (const PathSample& p : paths) {
        mi += p.values[i];
        mj += p.values[j];
    }
    mi /= n;
    mj /= n;
    double acc = 0.0;
    for (const PathSample& p : paths) acc += (p.values[i] - mi) * (p.values[j] - mj);
    return acc / (n - 1.0);
}

}  // namespace bfbm::simulate
