#pragma once

#include <functional>
#include <vector>

#include "bfbm/errors.hpp"

namespace bfbm::kernels {

enum class KernelId {
    BfBm,                // R(s,t) = 2^{-K} ((|s|^{2H}+|t|^{2H})^K - |t-s|^{2HK})
    FBm,                 // R(s,t) = (|s|^{2H}+|t|^{2H}-|t-s|^{2H}) / 2
    AntiSymFBm,          // R(s,t) = (s+t)^{2H} - |t-s|^{2H},  s,t >= 0
    LeiNualart,          // R(s,t) = s^K + t^K - (s+t)^K,      s,t >= 0
    LeiNualartRescaled,  // R(s,t) = |s|^{2HK}+|t|^{2HK}-(|s|^{2H}+|t|^{2H})^K
    BernsteinGeneric,    // R(s,t) = f(sig2(s)+sig2(t)) - f(sig2(s-t))
};

// (H, K) parameter pair.  H is the fBm-like roughness index, K the
// subordination index.  Existence of the bifractional field is only
// guaranteed on part of the quadrant; `classify` reports the coarse zones.
enum class ParamClass {
    FbmLine,    // K = 1: plain fBm with index H
    Candidate,  // K <= 2 and HK <= 1 (necessary conditions hold)
    Forbidden,  // a necessary condition fails
};

struct Params {
    double h;
    double k;
    Params(double h_, double k_);
    ParamClass classify() const;
};

double cov_fbm(double h, double s, double t);                      // 0 < h <= 1
double cov_bfbm(const Params& p, double s, double t);              // h, k > 0
double cov_antisym_fbm(double h, double s, double t);              // 0 < h <= 1, s,t >= 0
double cov_lei_nualart(double k, double s, double t);              // 0 < k < 2, k != 1, s,t >= 0
double cov_lei_nualart_rescaled(const Params& p, double s, double t);

// Lei-Nualart process with the normalizing constant of its spectral
// representation: c_K (s^K + t^K - (s+t)^K) with c_K = Gamma(1-K)/K for
// K in (0,1) and the sign-flipped form for K in (1,2).
double cov_lei_nualart_normalized(double k, double s, double t);

// Bernstein-function covariance R(s,t) = f(sig2(s)+sig2(t)) - f(sig2(s-t))
// with f(x) = a + b x + sum_j mass_j (1 - e^{-x_j x}).
struct BernsteinAtom {
    double x;
    double mass;
};

class BernsteinSpec {
  public:
    BernsteinSpec(double a, double b, std::vector<BernsteinAtom> atoms,
                  std::function<double(double)> sigma_sq);
    double f(double lambda) const;
    double sigma_sq(double t) const { return sigma_sq_(t); }

  private:
    double a_, b_;
    std::vector<BernsteinAtom> atoms_;
    std::function<double(double)> sigma_sq_;
};

double cov_bernstein(const BernsteinSpec& spec, double s, double t);

// Discretization of f(x) = x^K = (K/Gamma(1-K)) int_0^inf (1-e^{-ux}) u^{-1-K} du
// by Gauss-Legendre quadrature in log u over [x_lo, x_hi].
BernsteinSpec power_bernstein(double k, std::function<double(double)> sigma_sq,
                              double x_lo = 1e-10, double x_hi = 1e10, int nodes = 400);

// Lamperti-stationary covariances, tau = log-time lag.  Supported kernels:
// FBm (0 < h <= 1), LeiNualart (0 < k < 1), LeiNualartRescaled (0 < k < 1),
// BfBm (h, k > 0).  Evaluated in factored form so that no catastrophic
// cancellation occurs even for |tau| ~ 500.
double stat_cov(KernelId kid, const Params& p, double tau);

// Pointwise kernel dispatch for Gram probes; BernsteinGeneric is rejected
// because it needs an explicit BernsteinSpec.
double kernel_value(KernelId kid, const Params& p, double s, double t);

}  // namespace bfbm::kernels
