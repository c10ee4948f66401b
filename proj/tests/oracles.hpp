// Test-only reference implementations ("oracles").  They deliberately avoid
// the code paths of the library: spectral densities are recovered here by
// Fourier-inverting the *stationary covariances*, using straightforward
// complex arithmetic on std::complex rather than the library's log-gamma.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "bfbm/numerics.hpp"

namespace oracles {

using Cx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

// complex log1p / expm1 accurate for small |w|
inline Cx log1p_c(Cx w) {
    if (std::abs(w) < 1e-4) {
        return w * (1.0 + w * (-0.5 + w * (1.0 / 3.0 + w * (-0.25 + w / 5.0))));
    }
    return std::log(1.0 + w);
}

inline Cx expm1_c(Cx w) {
    if (std::abs(w) < 1e-4) {
        return w * (1.0 + w * (0.5 + w * (1.0 / 6.0 + w * (1.0 / 24.0 + w / 120.0))));
    }
    return std::exp(w) - 1.0;
}

// Stationary (Lamperti) covariances continued to complex lag, Re tau >= 0,
// |Im tau| < pi.  Same factored forms as the real case, so no cancellation.
inline Cx stat_fbm_c(double h, Cx tau) {
    Cx bracket = std::exp(-2.0 * h * tau) - expm1_c(2.0 * h * log1p_c(-std::exp(-tau)));
    return 0.5 * std::exp(h * tau) * bracket;
}

inline Cx stat_ln_c(double k, Cx tau) {
    Cx bracket = std::exp(-k * tau) - expm1_c(k * log1p_c(std::exp(-tau)));
    return std::exp(0.5 * k * tau) * bracket;
}

// Integrate f over [0, b] with panels graded dyadically toward 0 (the
// stationary covariances have an algebraic branch point |tau|^{2h} there),
// then regular panels on [1, b].
inline double integrate_from_zero(const std::function<double(double)>& f, double b,
                                  double width, int nodes) {
    namespace num = bfbm::numerics;
    double head = std::min(1.0, b);
    double sum = 0.0;
    double hi = head;
    for (int j = 0; j < 64 && hi > 0.0; ++j) {
        double lo = 0.5 * hi;
        sum += num::integrate_gl(f, lo, hi, nodes);
        hi = lo;
    }
    if (b > head) sum += num::integrate_panels(f, head, b, width, nodes);
    return sum;
}

// f(u) = (1/pi) Re int_0^inf e^{-i u tau} R(tau) dtau for even R.  For u > 2
// the contour is shifted to tau = x - i c (0 < c < pi), which extracts the
// e^{-u c} smallness analytically:
//   f(u) = (e^{-u c}/pi) Re int_0^inf e^{-i u x} R(x - i c) dx   (+ endpoint leg)
// The vertical leg from 0 to -i c contributes
//   (1/pi) Re int_0^c e^{-u y} R(-i y) (-i) dy.
inline double spectral_density_oracle(const std::function<Cx(Cx)>& stat_c, double u,
                                      double decay_rate, bool branch_point_at_zero,
                                      double contour = 2.8) {
    u = std::abs(u);
    double tau_max = std::min(1200.0, 60.0 / decay_rate);
    double width = 0.25 / (1.0 + u);
    if (u <= 2.0) {
        auto g = [&](double t) { return (std::cos(u * t) * stat_c(Cx(t, 0.0))).real(); };
        return integrate_from_zero(g, tau_max, width, 16) / kPi;
    }
    const double c = contour;
    // horizontal leg at Im tau = -c
    auto gh = [&](double x) {
        Cx val = std::exp(Cx(0.0, -u * x)) * stat_c(Cx(x, -c));
        return val.real();
    };
    double horiz = std::exp(-u * c) * integrate_from_zero(gh, tau_max, width, 16);
    // vertical leg from 0 down to -ic.  For an even covariance analytic at
    // tau = 0 the integrand is exactly real there, so the leg vanishes and
    // evaluating it would only add rounding noise (fatal when the density is
    // ~1e-16).  When tau = 0 is a branch point (|tau|^{2h}) the leg carries
    // the entire power tail and must be kept.
    double vert = 0.0;
    if (branch_point_at_zero) {
        auto gv = [&](double y) {
            Cx val = Cx(0.0, -1.0) * std::exp(-u * y) * stat_c(Cx(0.0, -y));
            return val.real();
        };
        vert = integrate_from_zero(gv, c, 0.05, 16);
    }
    return (horiz + vert) / kPi;
}

inline double f_ou_oracle(double h, double u) {
    // stat fbm decays like e^{-min(h,1-h)|tau|}; |tau|^{2h} branch point at 0
    double rate = std::min(h, 1.0 - h);
    return spectral_density_oracle([h](Cx t) { return stat_fbm_c(h, t); }, u, rate, true);
}

inline double f_ln_oracle(double k, double u) {
    // 2 e^{-k tau/2} - (2 cosh(tau/2))^k is analytic in |Im tau| < pi
    double rate = 0.5 * k;
    return spectral_density_oracle([k](Cx t) { return stat_ln_c(k, t); }, u, rate, false);
}

}  // namespace oracles
