#include "bfbm/kernels.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "bfbm/numerics.hpp"

namespace bfbm::kernels {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite argument");
}

// |x|^p with 0^p = 0 for p > 0.
double pow_abs(double x, double p) {
    double a = std::abs(x);
    return a == 0.0 ? 0.0 : std::pow(a, p);
}

}  // namespace

Params::Params(double h_, double k_) : h(h_), k(k_) {
    if (!std::isfinite(h) || !std::isfinite(k) || h <= 0.0 || k <= 0.0)
        throw DomainError("Params: requires finite h > 0 and k > 0");
}

ParamClass Params::classify() const {
    if (k == 1.0) return ParamClass::FbmLine;
    if (k <= 2.0 && h * k <= 1.0) return ParamClass::Candidate;
    return ParamClass::Forbidden;
}

double cov_fbm(double h, double s, double t) {
    if (!(h > 0.0 && h <= 1.0)) throw DomainError("cov_fbm: requires 0 < h <= 1");
    require_finite(s, "cov_fbm");
    require_finite(t, "cov_fbm");
    return 0.5 * (pow_abs(s, 2.0 * h) + pow_abs(t, 2.0 * h) - pow_abs(t - s, 2.0 * h));
}

double cov_bfbm(const Params& p, double s, double t) {
    require_finite(s, "cov_bfbm");
    require_finite(t, "cov_bfbm");
    double sum = pow_abs(s, 2.0 * p.h) + pow_abs(t, 2.0 * p.h);
    double base = sum == 0.0 ? 0.0 : std::pow(sum, p.k);
    return std::exp2(-p.k) * (base - pow_abs(t - s, 2.0 * p.h * p.k));
}

double cov_antisym_fbm(double h, double s, double t) {
    if (!(h > 0.0 && h <= 1.0)) throw DomainError("cov_antisym_fbm: requires 0 < h <= 1");
    require_finite(s, "cov_antisym_fbm");
    require_finite(t, "cov_antisym_fbm");
    if (s < 0.0 || t < 0.0) throw DomainError("cov_antisym_fbm: requires s, t >= 0");
    return pow_abs(s + t, 2.0 * h) - pow_abs(t - s, 2.0 * h);
}

double cov_lei_nualart(double k, double s, double t) {
    if (!(k > 0.0 && k < 2.0) || k == 1.0)
        throw DomainError("cov_lei_nualart: requires k in (0,1) or (1,2)");
    require_finite(s, "cov_lei_nualart");
    require_finite(t, "cov_lei_nualart");
    if (s < 0.0 || t < 0.0) throw DomainError("cov_lei_nualart: requires s, t >= 0");
    return pow_abs(s, k) + pow_abs(t, k) - pow_abs(s + t, k);
}

double cov_lei_nualart_normalized(double k, double s, double t) {
    double raw = cov_lei_nualart(k, s, t);
    if (k < 1.0) return std::tgamma(1.0 - k) / k * raw;
    // K in (1,2): c_K = Gamma(2-K)/(K(K-1)), and the raw form is negative.
    return -std::tgamma(2.0 - k) / (k * (k - 1.0)) * raw;
}

double cov_lei_nualart_rescaled(const Params& p, double s, double t) {
    require_finite(s, "cov_lei_nualart_rescaled");
    require_finite(t, "cov_lei_nualart_rescaled");
    double hs = pow_abs(s, 2.0 * p.h);
    double ht = pow_abs(t, 2.0 * p.h);
    double sum = hs + ht;
    return pow_abs(s, 2.0 * p.h * p.k) + pow_abs(t, 2.0 * p.h * p.k) -
           (sum == 0.0 ? 0.0 : std::pow(sum, p.k));
}

BernsteinSpec::BernsteinSpec(double a, double b, std::vector<BernsteinAtom> atoms,
                             std::function<double(double)> sigma_sq)
    : a_(a), b_(b), atoms_(std::move(atoms)), sigma_sq_(std::move(sigma_sq)) {
    if (!std::isfinite(a_) || !std::isfinite(b_) || a_ < 0.0 || b_ < 0.0)
        throw DomainError("BernsteinSpec: requires finite a, b >= 0");
    for (const auto& atom : atoms_) {
        if (!(atom.x > 0.0) || !(atom.mass >= 0.0) || !std::isfinite(atom.x) ||
            !std::isfinite(atom.mass))
            throw DomainError("BernsteinSpec: atoms need x > 0 and mass >= 0");
    }
    if (!sigma_sq_) throw DomainError("BernsteinSpec: missing sigma_sq");
    if (sigma_sq_(0.0) != 0.0) throw DomainError("BernsteinSpec: sigma_sq(0) must be 0");
}

double BernsteinSpec::f(double lambda) const {
    if (!(lambda >= 0.0)) throw DomainError("BernsteinSpec::f: requires lambda >= 0");
    double val = a_ + b_ * lambda;
    for (const auto& atom : atoms_) val += atom.mass * (-std::expm1(-atom.x * lambda));
    return val;
}

double cov_bernstein(const BernsteinSpec& spec, double s, double t) {
    require_finite(s, "cov_bernstein");
    require_finite(t, "cov_bernstein");
    double vs = spec.sigma_sq(s);
    double vt = spec.sigma_sq(t);
    double vd = spec.sigma_sq(s - t);
    if (!(vs >= 0.0 && vt >= 0.0 && vd >= 0.0))
        throw DomainError("cov_bernstein: sigma_sq must be nonnegative");
    return spec.f(vs + vt) - spec.f(vd);
}

BernsteinSpec power_bernstein(double k, std::function<double(double)> sigma_sq,
                              double x_lo, double x_hi, int nodes) {
    if (!(k > 0.0 && k < 1.0)) throw DomainError("power_bernstein: requires 0 < k < 1");
    if (!(x_lo > 0.0 && x_hi > x_lo)) throw DomainError("power_bernstein: bad support");
    // x^k = (k / Gamma(1-k)) int (1 - e^{-u x}) u^{-1-k} du; nodes in log u.
    const double c = k / std::tgamma(1.0 - k);
    const double y_lo = std::log(x_lo), y_hi = std::log(x_hi);
    const auto& gl = numerics::gauss_legendre(nodes);
    std::vector<BernsteinAtom> atoms;
    atoms.reserve(gl.size());
    const double half = 0.5 * (y_hi - y_lo), mid = 0.5 * (y_hi + y_lo);
    for (const auto& node : gl) {
        double y = mid + half * node.x;
        // u^{-1-k} du = e^{-k y} dy at u = e^y
        atoms.push_back(BernsteinAtom{std::exp(y), c * half * node.w * std::exp(-k * y)});
    }
    // Truncated tails to first order: below x_lo the integrand is ~ u^{-k} x
    // (a pure drift), above x_hi it is ~ u^{-1-k} (a constant, which cancels
    // in covariance differences).
    const double drift = c * std::pow(x_lo, 1.0 - k) / (1.0 - k);
    const double offset = c * std::pow(x_hi, -k) / k;
    return BernsteinSpec(offset, drift, std::move(atoms), std::move(sigma_sq));
}

namespace {

// Lamperti covariance of fBm: cosh(h tau) - 2^{2h-1} |sinh(tau/2)|^{2h},
// factored as e^{h a} (e^{-2 h a} - expm1(2h log1p(-e^{-a}))) / 2, a = |tau|.
double stat_fbm(double h, double tau) {
    if (!(h > 0.0 && h <= 1.0)) throw DomainError("stat_cov[FBm]: requires 0 < h <= 1");
    double a = std::abs(tau);
    double bracket = std::exp(-2.0 * h * a) - std::expm1(2.0 * h * std::log1p(-std::exp(-a)));
    return std::exp(h * a - kLn2 + std::log(bracket));
}

// Lamperti covariance of the Lei-Nualart process, K in (0,1):
// 2 cosh(K tau / 2) - (2 cosh(tau/2))^K
//   = e^{K a/2} (e^{-K a} - expm1(K log1p(e^{-a}))), a = |tau|.
double stat_ln(double k, double tau) {
    if (!(k > 0.0 && k < 1.0)) throw DomainError("stat_cov[LeiNualart]: requires 0 < k < 1");
    double a = std::abs(tau);
    double bracket = std::exp(-k * a) - std::expm1(k * std::log1p(std::exp(-a)));
    return std::exp(0.5 * k * a + std::log(bracket));
}

// Lamperti covariance of bfBm:
// cosh(h tau)^k - 2^{(2h-1)k} |sinh(tau/2)|^{2hk}
//   = 2^{-k} e^{h k a} (expm1(A) - expm1(B)),
// A = k log1p(e^{-2 h a}) >= 0 >= B = 2 h k log1p(-e^{-a}).
double stat_bfbm(const Params& p, double tau) {
    double a = std::abs(tau);
    double big_a = p.k * std::log1p(std::exp(-2.0 * p.h * a));
    double big_b = 2.0 * p.h * p.k * std::log1p(-std::exp(-a));
    double bracket = std::expm1(big_a) - std::expm1(big_b);
    return std::exp(p.h * p.k * a - p.k * kLn2 + std::log(bracket));
}

}  // namespace

double stat_cov(KernelId kid, const Params& p, double tau) {
    require_finite(tau, "stat_cov");
    switch (kid) {
        case KernelId::FBm:
            return stat_fbm(p.h, tau);
        case KernelId::LeiNualart:
            return stat_ln(p.k, tau);
        case KernelId::LeiNualartRescaled:
            if (!(p.k < 1.0)) throw DomainError("stat_cov[LNR]: requires 0 < k < 1");
            return stat_ln(p.k, 2.0 * p.h * tau);
        case KernelId::BfBm:
            return stat_bfbm(p, tau);
        default:
            throw DomainError("stat_cov: kernel has no stationary Lamperti form");
    }
}

double kernel_value(KernelId kid, const Params& p, double s, double t) {
    switch (kid) {
        case KernelId::BfBm:
            return cov_bfbm(p, s, t);
        case KernelId::FBm:
            return cov_fbm(p.h, s, t);
        case KernelId::AntiSymFBm:
            return cov_antisym_fbm(p.h, s, t);
        case KernelId::LeiNualart:
            return cov_lei_nualart(p.k, s, t);
        case KernelId::LeiNualartRescaled:
            return cov_lei_nualart_rescaled(p, s, t);
        default:
            throw DomainError("kernel_value: BernsteinGeneric needs a BernsteinSpec");
    }
}

}  // namespace bfbm::kernels
