#pragma once

#include "bfbm/errors.hpp"
#include "bfbm/kernels.hpp"

namespace bfbm::spectra {

enum class SpectrumId {
    FouClosed,   // fractional Ornstein-Uhlenbeck (Lamperti fBm), closed form
    FouSeries,   // the same density as an alternating Lorentzian series
    Ln,          // Lamperti Lei-Nualart density
    LnRescaled,  // rescaled Lei-Nualart density, f(u/2h)/(2h)
    LimitF1,     // K -> 0 limit density f_1
    LimitF2,     // K -> 0 limit density f_2
};

// Spectral density of the Lamperti-stationary fBm, 0 < h < 1:
//   f(u) = Gamma(2h+1) sin(pi h) cosh(pi u)
//          / (2 (u^2+h^2) |Gamma(h+iu)|^2 (sin^2(pi h) + sinh^2(pi u))).
// Assembled in log scale; exact closed form 2/(pi(4u^2+1)) at h = 1/2.
double log_f_ou(double h, double u);
double f_ou(double h, double u);

struct SeriesConfig {
    long max_terms = 2000000;
    double tail_tol = 1e-12;
};

// Lorentzian-mixture series for f_ou; h = 1/2 is excluded (the series
// representation degenerates there).  Throws ConvergenceError when the
// tail tolerance is not reached within max_terms.
double f_ou_series(double h, double u, const SeriesConfig& cfg = {});

// Spectral density of the Lamperti-stationary Lei-Nualart process, 0 < k < 1:
//   f(u) = k / Gamma(1-k) * |Gamma(-iu - k/2)|^2 / (2 pi).
double log_f_ln(double k, double u);
double f_ln(double k, double u);

// Rescaled version: density of tau -> stat_ln(k, 2h tau), i.e. f(u/2h)/(2h).
double log_f_ln_rescaled(const kernels::Params& p, double u);
double f_ln_rescaled(const kernels::Params& p, double u);

// K -> 0 limit pair:
//   f1(u) = phi(u/h)/h,  phi(v) = (1 - pi v / (2 sinh(pi v / 2))) / (pi v^2)
//   f2(u) = (2h/pi) sum_{n>=1} 1/(u^2+n^2) = h (pi u coth(pi u) - 1)/(pi u^2)
// with series evaluation near u = 0.
enum class LimitPart { F1, F2 };
double f_limit_k0(LimitPart part, double h, double u);

struct QuadratureSettings {
    double panel_width = 0.5;
    int nodes_per_panel = 12;
    double u_max = 0.0;     // 0 = automatic per kernel
    double max_u_max = 1e6; // guard for the small-tau tail treatment
};

// Consistency probe: evaluates 2 int_0^inf cos(tau u) f(u) du for the
// spectral density matching `kid` (FBm -> f_ou, LeiNualart -> f_ln,
// LeiNualartRescaled -> f_ln_rescaled) so the caller can compare it with
// stat_cov.  The fOU density has a power tail ~ u^{-1-2h}; it is integrated
// by panels up to u_max and closed with an analytic asymptotic correction.
double fourier_check(kernels::KernelId kid, const kernels::Params& p, double tau,
                     const QuadratureSettings& quad = {});

}  // namespace bfbm::spectra
