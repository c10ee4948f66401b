#include "bfbm/existence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "bfbm/errors.hpp"
#include "bfbm/linalg.hpp"
#include "bfbm/spectra.hpp"

namespace bfbm::existence {

using kernels::KernelId;
using kernels::Params;

namespace {

// sup <= 1 is tested with this much slack so that the K = 1 line (where the
// sup equals 1 up to rounding) is not rejected spuriously.
constexpr double kSupTol = 1e-12;

void validate(const ScanConfig& cfg) {
    if (!(cfg.u_max >= 1.0)) throw DomainError("scan requires u_max >= 1");
    if (!(cfg.u_step > 0.0)) throw DomainError("scan requires a positive u_step");
    if (!(cfg.tau_max > 0.0)) throw DomainError("scan requires a positive tau_max");
    if (!(cfg.k_tol > 0.0)) throw DomainError("bisection requires a positive k_tol");
}

Verdict pass_through(Reason reason, Domain domain = Domain::HalfLine) {
    return Verdict{Status::BoundaryUndecided, reason, domain, std::nullopt};
}

bool sup_bounded(const Params& p, const ScanConfig& cfg) {
    return stationary_sup(p, cfg).value <= 1.0 + kSupTol;
}

}  // namespace

Verdict check_necessary(const Params& p) {
    if (p.k > 2.0) {
        return Verdict{Status::NotExists, Reason::PropNecessary, Domain::HalfLine,
                       Witness{0.0, p.k, 2.0, "K <= 2"}};
    }
    if (p.h * p.k > 1.0) {
        return Verdict{Status::NotExists, Reason::PropNecessary, Domain::HalfLine,
                       Witness{0.0, p.h * p.k, 1.0, "H*K <= 1"}};
    }
    return pass_through(Reason::PropNecessary);
}

Verdict check_cov_bound_r(const Params& p) {
    const double lhs = (2.0 * p.h - 1.0) * p.k;
    if (p.h > 0.5 && lhs > 1.0) {
        return Verdict{Status::NotExists, Reason::CovarianceBound, Domain::FullLine,
                       Witness{0.0, lhs, 1.0, "(2H-1)K <= 1"}};
    }
    return pass_through(Reason::CovarianceBound, Domain::FullLine);
}

SupResult stationary_sup(const Params& p, const ScanConfig& cfg) {
    validate(cfg);
    const double tau_lo = 1e-6;
    const double grid_step = 1e-3;

    double best_tau = tau_lo;
    double best_val = -std::numeric_limits<double>::infinity();
    for (double tau = tau_lo; tau <= cfg.tau_max; tau += grid_step) {
        const double val = kernels::stat_cov(KernelId::BfBm, p, tau);
        if (!std::isfinite(val)) {
            throw ScanError("stationary covariance is not finite at tau = " +
                            std::to_string(tau));
        }
        if (val > best_val) {
            best_val = val;
            best_tau = tau;
        }
    }

    // golden-section refinement on the bracketing grid cells
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::max(tau_lo, best_tau - grid_step);
    double b = std::min(cfg.tau_max, best_tau + grid_step);
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = kernels::stat_cov(KernelId::BfBm, p, x1);
    double f2 = kernels::stat_cov(KernelId::BfBm, p, x2);
    for (int it = 0; it < 120 && b - a > 1e-10; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = kernels::stat_cov(KernelId::BfBm, p, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = kernels::stat_cov(KernelId::BfBm, p, x1);
        }
    }
    const double mid = 0.5 * (a + b);
    const double fm = kernels::stat_cov(KernelId::BfBm, p, mid);
    if (fm > best_val) {
        best_val = fm;
        best_tau = mid;
    }
    return SupResult{best_val, best_tau};
}

double khat(double h, const ScanConfig& cfg) {
    validate(cfg);
    if (!(h >= 1.0)) throw DomainError("khat is defined for h >= 1");
    const double hi_bound = std::min(1.0, 1.0 / h);

    if (sup_bounded(Params(h, hi_bound), cfg)) return hi_bound;
    double lo = 0.0;  // sup -> value at tau -> 0+, which is 1: holds trivially
    double hi = hi_bound;
    while (hi - lo > cfg.k_tol) {
        const double mid = 0.5 * (lo + hi);
        if (sup_bounded(Params(h, mid), cfg)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double spectral_gap(const Params& p, double u) {
    if (!(p.k > 0.0 && p.k < 1.0) || !(p.h * p.k < 1.0)) {
        throw DomainError("spectral criterion requires 0 < K < 1 and HK < 1");
    }
    const double hk = p.h * p.k;
    return std::numbers::ln2 + spectra::log_f_ou(hk, u) - spectra::log_f_ln_rescaled(p, u);
}

Verdict check_spectral(const Params& p, const ScanConfig& cfg) {
    validate(cfg);
    const long n_steps = std::lround(cfg.u_max / cfg.u_step);

    double min_gap = std::numeric_limits<double>::infinity();
    double min_u = 0.0;
    auto scan = [&](double lo, double hi, double step) -> std::optional<Witness> {
        const long first = std::lround(lo / step);
        const long last = std::lround(hi / step);
        for (long i = first; i <= last; ++i) {
            const double u = static_cast<double>(i) * step;
            const double gap = spectral_gap(p, u);
            if (gap < min_gap) {
                min_gap = gap;
                min_u = u;
            }
            if (gap < 0.0) {
                return Witness{u, spectra::log_f_ln_rescaled(p, u),
                               std::numbers::ln2 + spectra::log_f_ou(p.h * p.k, u),
                               "f_X(u) <= 2 f_W(u)"};
            }
        }
        return std::nullopt;
    };

    auto witness = scan(0.0, n_steps * cfg.u_step, cfg.u_step);
    if (!witness && cfg.refine) {
        const double lo = std::max(0.0, min_u - cfg.u_step);
        const double hi = std::min(cfg.u_max, min_u + cfg.u_step);
        witness = scan(lo, hi, cfg.u_step / 10.0);
    }
    if (witness) {
        return Verdict{Status::NotExists, Reason::SpectralCriterion, Domain::HalfLine,
                       std::move(witness)};
    }
    // report the tightest point of the inequality as an informative witness
    return Verdict{Status::Exists, Reason::SpectralCriterion, Domain::HalfLine,
                   Witness{min_u, spectra::log_f_ln_rescaled(p, min_u),
                           std::numbers::ln2 + spectra::log_f_ou(p.h * p.k, min_u),
                           "f_X(u) <= 2 f_W(u)"}};
}

double kbar(double h, const ScanConfig& cfg) {
    validate(cfg);
    if (!(h > 1.0)) throw DomainError("kbar is defined for h > 1");
    const double cap = std::min(khat(h, cfg), 1.0 / h);

    auto holds = [&](double k) {
        return check_spectral(Params(h, k), cfg).status == Status::Exists;
    };

    double lo = std::min(cfg.k_tol, 0.5 * cap);
    if (!holds(lo)) {
        throw NonMonotoneError("spectral criterion fails already at K = " +
                               std::to_string(lo));
    }
    double hi = cap;
    double result;
    if (holds(hi)) {
        result = hi;
    } else {
        while (hi - lo > cfg.k_tol) {
            const double mid = 0.5 * (lo + hi);
            if (holds(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        result = 0.5 * (lo + hi);
    }

    // post-hoc single-crossing verification
    const double below = result - 2.0 * cfg.k_tol;
    if (below > 0.0 && !holds(below)) {
        throw NonMonotoneError("criterion fails below the boundary at K = " +
                               std::to_string(below));
    }
    const double above = result + 2.0 * cfg.k_tol;
    // beyond min(1, 1/h) the necessary conditions already fail; nothing to probe
    if (above < std::min(1.0, 1.0 / h) && result < cap && holds(above)) {
        throw NonMonotoneError("criterion still holds above the boundary at K = " +
                               std::to_string(above));
    }
    return result;
}

std::vector<BoundaryRow> boundary_table(const std::vector<double>& h_values,
                                        const ScanConfig& cfg, unsigned threads) {
    validate(cfg);
    std::vector<BoundaryRow> rows(h_values.size());
    if (h_values.empty()) return rows;

    const unsigned workers =
        std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(h_values.size())));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= h_values.size()) return;
            try {
                const double h = h_values[i];
                rows[i] = BoundaryRow{h, kbar(h, cfg), khat(h, cfg)};
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return rows;
}

PsdProbe gram_psd_probe(KernelId kid, const Params& p, const std::vector<double>& points,
                        double jitter_tol) {
    if (points.empty()) throw DomainError("gram probe needs at least one point");
    if (points.size() > 2000) throw DomainError("gram probe supports at most 2000 points");
    if (!(jitter_tol >= 0.0)) throw DomainError("jitter tolerance must be nonnegative");
    if (std::set<double>(points.begin(), points.end()).size() != points.size()) {
        throw DomainError("gram probe points must be distinct");
    }

    const std::size_t n = points.size();
    std::vector<double> gram(n * n);
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = kernels::kernel_value(kid, p, points[i], points[j]);
            gram[i * n + j] = gram[j * n + i] = v;
        }
        max_diag = std::max(max_diag, std::abs(gram[i * n + i]));
    }
    const double min_eig = linalg::smallest_eigenvalue_symmetric(std::move(gram), n);
    return PsdProbe{min_eig, min_eig >= -jitter_tol * std::max(max_diag, 1e-300)};
}

Verdict check_existence(const Params& p, const ScanConfig& cfg) {
    validate(cfg);
    Verdict necessary = check_necessary(p);
    if (necessary.status == Status::NotExists) return necessary;

    if (p.k == 1.0) {
        return Verdict{Status::Exists, Reason::FbmLine, Domain::HalfLine, std::nullopt};
    }
    if (p.h <= 1.0) {
        // K <= min(2, 1/H) follows from the necessary conditions here
        return Verdict{Status::Exists, Reason::KnownZone, Domain::HalfLine, std::nullopt};
    }

    const SupResult sup = stationary_sup(p, cfg);
    if (sup.value > 1.0 + kSupTol) {
        return Verdict{Status::NotExists, Reason::CovarianceBound, Domain::HalfLine,
                       Witness{sup.tau_star, sup.value, 1.0, "sup R~(tau) <= R~(0)"}};
    }
    if (p.k < 1.0 && p.h * p.k < 1.0) return check_spectral(p, cfg);
    return pass_through(Reason::CovarianceBound);
}

}  // namespace bfbm::existence
