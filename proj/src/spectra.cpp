#include "bfbm/spectra.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "bfbm/numerics.hpp"
#include "bfbm/special.hpp"

namespace bfbm::spectra {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

void require_finite_u(double u) {
    if (!std::isfinite(u)) throw DomainError("spectra: non-finite frequency");
}

}  // namespace

double log_f_ou(double h, double u) {
    if (!(h > 0.0 && h < 1.0)) throw DomainError("f_ou: requires 0 < h < 1");
    require_finite_u(u);
    double au = std::abs(u);
    double log_sin = std::log(std::sin(kPi * h));
    // log(sin^2(pi h) + sinh^2(pi u)) via log-sum-exp; the identity
    // sin^2(pi h) cosh^2(pi u) + cos^2(pi h) sinh^2(pi u)
    //   = sin^2(pi h) + sinh^2(pi u) removes the cancellation-prone mix.
    double log_sinh_sq = au > 0.0
                             ? 2.0 * special::log_sinh(kPi * au).log_value
                             : -std::numeric_limits<double>::infinity();
    double log_denom_mix = numerics::log_sum_exp(2.0 * log_sin, log_sinh_sq);
    return std::lgamma(2.0 * h + 1.0) + log_sin - std::numbers::ln2 -
           std::log(u * u + h * h) - special::log_abs_gamma_sq({h, au}).log_value +
           special::log_cosh(kPi * au).log_value - log_denom_mix;
}

double f_ou(double h, double u) { return std::exp(log_f_ou(h, u)); }

double f_ou_series(double h, double u, const SeriesConfig& cfg) {
    if (!(h > 0.0 && h < 1.0)) throw DomainError("f_ou_series: requires 0 < h < 1");
    if (h == 0.5)
        throw DomainError("f_ou_series: series representation degenerates at h = 1/2");
    require_finite_u(u);
    if (cfg.max_terms < 4 || !(cfg.tail_tol > 0.0))
        throw DomainError("f_ou_series: bad SeriesConfig");
    const double uu = u * u;
    double coeff = 1.0;  // C_{k,h} = Gamma(2h+1)/(Gamma(k+1) Gamma(2h-k+1))
    double sum = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (long k = 0; k < cfg.max_terms; ++k) {
        double km = static_cast<double>(k) - h;
        double term = ((k % 2 == 0) ? -1.0 : 1.0) * coeff * km / (2.0 * kPi * (uu + km * km));
        sum += term;
        if (k >= 4 && std::abs(term) < cfg.tail_tol && std::abs(prev) < cfg.tail_tol) {
            // past k = 2h+1 the terms keep one sign and decay like k^{-2h-2},
            // so the omitted tail is ~ k/(2h+1) times the last term; close the
            // sum with the integral of the matched power law (valid for u << k)
            const double kk = static_cast<double>(k);
            const double tail = term * kk / (2.0 * h + 1.0) *
                                std::pow(kk / (kk + 0.5), 2.0 * h + 1.0);
            return sum + tail;
        }
        prev = term;
        coeff *= (2.0 * h - static_cast<double>(k)) / (static_cast<double>(k) + 1.0);
    }
    throw ConvergenceError("f_ou_series: tail tolerance " + std::to_string(cfg.tail_tol) +
                           " not reached within " + std::to_string(cfg.max_terms) +
                           " terms");
}

double log_f_ln(double k, double u) {
    if (!(k > 0.0 && k < 1.0)) throw DomainError("f_ln: requires 0 < k < 1");
    require_finite_u(u);
    double au = std::abs(u);
    return std::log(k) - std::lgamma(1.0 - k) - kLog2Pi +
           special::log_abs_gamma_sq({-0.5 * k, au}).log_value;
}

double f_ln(double k, double u) { return std::exp(log_f_ln(k, u)); }

double log_f_ln_rescaled(const kernels::Params& p, double u) {
    if (!(p.k < 1.0)) throw DomainError("f_ln_rescaled: requires 0 < k < 1");
    return log_f_ln(p.k, u / (2.0 * p.h)) - std::log(2.0 * p.h);
}

double f_ln_rescaled(const kernels::Params& p, double u) {
    return std::exp(log_f_ln_rescaled(p, u));
}

namespace {

// phi(v) = (1 - pi v / (2 sinh(pi v/2))) / (pi v^2), even, phi(0) = pi/24.
// For small x = pi v / 2:  1 - x/sinh(x) = x^2/6 - 7x^4/360 + 31x^6/15120 - ...
double phi_limit(double v) {
    double x = 0.5 * kPi * std::abs(v);
    if (x < 1e-3) {
        double x2 = x * x;
        double s = 1.0 / 6.0 +
                   x2 * (-7.0 / 360.0 + x2 * (31.0 / 15120.0 - x2 * 127.0 / 604800.0));
        // phi = (x^2 s) / (pi v^2) = (pi/4) s
        return 0.25 * kPi * s;
    }
    return (1.0 - x / std::sinh(x)) / (kPi * v * v);
}

// S(u) = sum_{n>=1} 1/(u^2+n^2) = (pi u coth(pi u) - 1) / (2 u^2), S(0) = pi^2/6.
double lorentzian_sum(double u) {
    double x = kPi * std::abs(u);
    if (x < 1e-2) {
        // x coth x = 1 + x^2/3 - x^4/45 + 2x^6/945 - ...
        double x2 = x * x;
        return kPi * kPi * (1.0 / 6.0 + x2 * (-1.0 / 90.0 + x2 * (1.0 / 945.0)));
    }
    return (x / std::tanh(x) - 1.0) / (2.0 * u * u);
}

}  // namespace

double f_limit_k0(LimitPart part, double h, double u) {
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("f_limit_k0: requires h > 0");
    require_finite_u(u);
    if (part == LimitPart::F1) return phi_limit(u / h) / h;
    return 2.0 * h / kPi * lorentzian_sum(u);
}

namespace {

// int_U^inf u^{-s} cos(tau u) du by repeated integration by parts; valid
// when tau U is comfortably larger than s.  Terms decay like (s/(tau U))^m.
double power_tail_cos(double s, double tau, double big_u) {
    if (tau == 0.0) return std::pow(big_u, 1.0 - s) / (s - 1.0);
    const double sn = std::sin(tau * big_u), cs = std::cos(tau * big_u);
    double result = 0.0;
    double coef = 1.0;
    double s_cur = s;
    for (int m = 0; m < 40; ++m) {
        // I_{s} = -sin(tau U) U^{-s}/tau + (s/tau) J_{s+1}
        double t1 = coef * (-sn) * std::pow(big_u, -s_cur) / tau;
        result += t1;
        coef *= s_cur / tau;
        s_cur += 1.0;
        // J_{s} = cos(tau U) U^{-s}/tau - (s/tau) I_{s+1}
        double t2 = coef * cs * std::pow(big_u, -s_cur) / tau;
        result += t2;
        coef *= -s_cur / tau;
        s_cur += 1.0;
        double next_scale = std::abs(coef) * std::pow(big_u, -s_cur) / std::abs(tau);
        if (next_scale < 1e-18 * (std::abs(result) + 1e-30)) return result;
        if (s_cur > std::abs(tau) * big_u)
            throw QuadratureError("power_tail_cos: tau*U too small for the tail series");
    }
    throw QuadratureError("power_tail_cos: tail series did not converge");
}

}  // namespace

double fourier_check(kernels::KernelId kid, const kernels::Params& p, double tau,
                     const QuadratureSettings& quad) {
    if (!std::isfinite(tau)) throw DomainError("fourier_check: non-finite tau");
    const double atau = std::abs(tau);
    std::function<double(double)> f;
    double u_max = quad.u_max;
    bool power_tail = false;
    double tail_exponent = 0.0, tail_coef = 0.0;

    switch (kid) {
        case kernels::KernelId::FBm: {
            double h = p.h;
            f = [h](double u) { return f_ou(h, u); };
            // f_ou(u) ~ c_h u^{-1-2h}, c_h = Gamma(2h+1) sin(pi h)/(2 pi)
            power_tail = true;
            tail_exponent = 1.0 + 2.0 * h;
            tail_coef = std::tgamma(2.0 * h + 1.0) * std::sin(kPi * h) / (2.0 * kPi);
            if (u_max <= 0.0) u_max = 4000.0;
            // the tail series needs tau*U >> s
            if (atau > 0.0) u_max = std::max(u_max, 16.0 * tail_exponent / atau);
            if (u_max > quad.max_u_max)
                throw QuadratureError("fourier_check: tau too small for the tail series");
            break;
        }
        case kernels::KernelId::LeiNualart: {
            double k = p.k;
            if (!(k < 1.0)) throw DomainError("fourier_check: LeiNualart needs k < 1");
            f = [k](double u) { return f_ln(k, u); };
            if (u_max <= 0.0) u_max = 40.0;  // exponential tail e^{-pi u}
            break;
        }
        case kernels::KernelId::LeiNualartRescaled: {
            kernels::Params pc = p;
            if (!(pc.k < 1.0)) throw DomainError("fourier_check: LNR needs k < 1");
            f = [pc](double u) { return f_ln_rescaled(pc, u); };
            if (u_max <= 0.0) u_max = 40.0 * std::max(1.0, 2.0 * p.h);
            break;
        }
        default:
            throw DomainError("fourier_check: no spectral density for this kernel");
    }

    // Panels small enough to resolve cos(tau u).
    double width = quad.panel_width;
    if (atau > 3.0) width = std::min(width, 1.5 / atau);
    double integral = numerics::integrate_panels(
        [&](double u) { return std::cos(tau * u) * f(u); }, 0.0, u_max, width,
        quad.nodes_per_panel);
    if (power_tail) integral += tail_coef * power_tail_cos(tail_exponent, tau, u_max);
    return 2.0 * integral;
}

}  // namespace bfbm::spectra
