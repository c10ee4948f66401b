#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

#include "bfbm/special.hpp"
#include "doctest.h"

using bfbm::DomainError;
using bfbm::PoleError;
using bfbm::special::Complex;
using bfbm::special::log_abs_gamma_sq;
using bfbm::special::log_cosh;
using bfbm::special::log_gamma;
using bfbm::special::log_sinh;

namespace {
const double kPi = std::numbers::pi;

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}
}  // namespace

TEST_SUITE_BEGIN("special");

TEST_CASE("log_gamma at classic real points") {
    // Gamma(1) = 1, Gamma(2) = 1
    CHECK(std::abs(log_gamma({1.0, 0.0}).real()) < 1e-14);
    CHECK(std::abs(log_gamma({1.0, 0.0}).imag()) < 1e-14);
    CHECK(std::abs(log_gamma({2.0, 0.0}).real()) < 1e-14);

    // Gamma(1/2) = sqrt(pi): log = 0.5723649429247001...
    double lg_half = log_gamma({0.5, 0.0}).real();
    CHECK(rel_err(lg_half, 0.5 * std::log(kPi)) < 1e-13);
    CHECK(lg_half == doctest::Approx(0.5723649429247001).epsilon(1e-12));

    // Gamma(5) = 24 via std::lgamma oracle
    CHECK(rel_err(log_gamma({5.0, 0.0}).real(), std::lgamma(5.0)) < 1e-13);
    CHECK(rel_err(std::exp(log_gamma({5.0, 0.0}).real()), 24.0) < 1e-13);
}

TEST_CASE("log_abs_gamma_sq examples") {
    // |Gamma(1/2 + i)|^2 = pi / cosh(pi) = 0.27165381616685...
    double got = std::exp(log_abs_gamma_sq({0.5, 1.0}).log_value);
    double want = kPi / std::cosh(kPi);
    CHECK(rel_err(got, want) < 1e-12);
    CHECK(got == doctest::Approx(0.2710149513994184).epsilon(1e-10));

    // Real argument: |Gamma(2)|^2 = 1
    CHECK(std::abs(log_abs_gamma_sq({2.0, 0.0}).log_value) < 1e-14);

    // Reflection into the left half plane: Gamma(-1/4) = -4 Gamma(3/4).
    // Oracle: std::tgamma, independent of the Lanczos path.
    double want_neg = std::pow(-4.0 * std::tgamma(0.75), 2.0);
    double got_neg = std::exp(log_abs_gamma_sq({-0.25, 0.0}).log_value);
    CHECK(rel_err(got_neg, want_neg) < 1e-12);
}

TEST_CASE("log_gamma recurrence property: Gamma(z+1) = z Gamma(z)") {
    std::mt19937 gen(20240811u);
    std::uniform_real_distribution<double> re_dist(-10.0, 10.0);
    std::uniform_real_distribution<double> im_dist(-48.0, 48.0);
    int checked = 0;
    while (checked < 1000) {
        Complex z(re_dist(gen), im_dist(gen));
        if (std::abs(z) > 50.0) continue;
        // stay away from poles where log|Gamma| is unbounded
        if (std::abs(z.imag()) < 1e-3 &&
            std::abs(z.real() - std::round(z.real())) < 1e-3 && z.real() < 0.5)
            continue;
        Complex ratio = std::exp(log_gamma(z + Complex(1.0, 0.0)) - log_gamma(z));
        CHECK(std::abs(ratio - z) / std::abs(z) < 1e-10);
        ++checked;
    }
}

TEST_CASE("conjugate symmetry of log_abs_gamma_sq is exact") {
    std::mt19937 gen(77u);
    std::uniform_real_distribution<double> re_dist(-9.5, 9.5);
    std::uniform_real_distribution<double> im_dist(0.001, 40.0);
    for (int i = 0; i < 200; ++i) {
        Complex z(re_dist(gen), im_dist(gen));
        double a = log_abs_gamma_sq(z).log_value;
        double b = log_abs_gamma_sq(std::conj(z)).log_value;
        CHECK(a == b);  // bitwise
    }
}

TEST_CASE("half-line modulus identity |Gamma(1/2+iu)|^2 cosh(pi u) = pi") {
    for (double u : {0.0, 0.5, 1.0, 5.0, 20.0}) {
        double log_prod = log_abs_gamma_sq({0.5, u}).log_value + log_cosh(kPi * u).log_value;
        CHECK(rel_err(std::exp(log_prod), kPi) < 1e-10);
    }
}

TEST_CASE("imaginary-axis identity |Gamma(iu)|^2 = pi / (u sinh(pi u))") {
    for (double u : {0.1, 1.0, 10.0}) {
        double log_prod = log_abs_gamma_sq({0.0, u}).log_value + std::log(u) +
                          log_sinh(kPi * u).log_value;
        CHECK(rel_err(std::exp(log_prod), kPi) < 1e-10);
    }
}

TEST_CASE("log_cosh / log_sinh") {
    CHECK(log_cosh(0.0).log_value == 0.0);
    // moderate arguments against the naive formula
    for (double x : {-5.0, -0.3, 0.7, 12.0, 30.0}) {
        CHECK(rel_err(log_cosh(x).log_value, std::log(std::cosh(x))) < 1e-13);
    }
    for (double x : {0.01, 0.5, 1.0, 20.0}) {
        CHECK(rel_err(log_sinh(x).log_value, std::log(std::sinh(x))) < 1e-13);
    }
    // log(sinh(1)) = log(1.1752011936438014)
    CHECK(log_sinh(1.0).log_value ==
          doctest::Approx(std::log(1.1752011936438014)).epsilon(1e-13));
    // large argument: log_cosh(100) = 100 - log 2 up to e^{-200}
    CHECK(rel_err(log_cosh(100.0).log_value, 100.0 - std::numbers::ln2) < 1e-15);
    CHECK(log_cosh(100.0).log_value == doctest::Approx(99.30685281944005).epsilon(1e-14));
    // evenness of log_cosh is exact
    CHECK(log_cosh(-7.25).log_value == log_cosh(7.25).log_value);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(log_gamma({0.0, 0.0}), PoleError);
    CHECK_THROWS_AS(log_gamma({-3.0, 0.0}), PoleError);
    CHECK_THROWS_AS(log_gamma({std::nan(""), 0.0}), DomainError);
    CHECK_THROWS_AS(log_sinh(0.0), DomainError);
    CHECK_THROWS_AS(log_sinh(-1.0), DomainError);
    CHECK_THROWS_AS(log_cosh(std::numeric_limits<double>::infinity()), DomainError);
}

TEST_SUITE_END();
