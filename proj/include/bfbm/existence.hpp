#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bfbm/kernels.hpp"

namespace bfbm::existence {

enum class Status { Exists, NotExists, BoundaryUndecided };

// The criterion that produced a verdict (or, for BoundaryUndecided, the
// deepest criterion that was consulted).
enum class Reason { PropNecessary, CovarianceBound, SpectralCriterion, FbmLine, KnownZone };

// Verdicts are specific to a time domain: the spectral criterion decides the
// half-line only, and on the full line only the (2H-1)K <= 1 necessity is
// available.
enum class Domain { HalfLine, FullLine };

// Point at which an inequality was checked: the two compared values and the
// coordinate (u for spectral checks, tau for covariance-bound checks).
struct Witness {
    double coordinate = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    std::string inequality;
};

struct Verdict {
    Status status;
    Reason reason;
    Domain domain = Domain::HalfLine;
    std::optional<Witness> witness;
};

struct ScanConfig {
    double u_max = 50.0;    // spectral scan box
    double u_step = 0.01;   // spectral scan step
    double tau_max = 50.0;  // lag-sup scan box
    double k_tol = 1e-3;    // bisection accuracy in K
    bool refine = false;    // re-scan at u_step/10 around the minimum gap
};

struct SupResult {
    double value;     // sup_{tau > 0} of the stationary covariance
    double tau_star;  // where it is attained
};

struct BoundaryRow {
    double h;
    double k_bar;  // spectral existence boundary
    double k_hat;  // covariance upper bound
};

struct PsdProbe {
    double min_eigenvalue;
    bool psd;
};

// K <= 2 and HK <= 1 (necessary on the half-line).  A pass is reported as
// BoundaryUndecided: this check alone never certifies existence.
Verdict check_necessary(const kernels::Params& p);

// (2H-1)K <= 1 (necessary on the full line); Domain::FullLine verdicts.
Verdict check_cov_bound_r(const kernels::Params& p);

// sup over tau in (0, tau_max] of the stationary bifractional covariance:
// dense grid (step 1e-3) plus golden-section refinement to 1e-10 in tau.
SupResult stationary_sup(const kernels::Params& p, const ScanConfig& cfg = {});

// Largest K (to within k_tol) with sup_tau R~(tau) <= 1, bisected over
// (0, min(1, 1/h)] using the monotonicity of the criterion in K.  h >= 1.
double khat(double h, const ScanConfig& cfg = {});

// log(2 f_ou(HK, u)) - log(f_ln_rescaled(H, K, u)); existence on the
// half-line is equivalent to this being >= 0 for all u.  0 < K < 1, HK < 1.
double spectral_gap(const kernels::Params& p, double u);

// Scans the spectral gap over [0, u_max]; a negative gap is a NotExists
// witness, otherwise Exists at the scan resolution.
Verdict check_spectral(const kernels::Params& p, const ScanConfig& cfg = {});

// Spectral existence boundary for h > 1: bisection of the check_spectral
// predicate over (0, min(khat(h), 1/h)), single crossing assumed and
// verified post hoc at +-2 k_tol (NonMonotoneError on contradiction).
double kbar(double h, const ScanConfig& cfg = {});

// Rows (h, kbar(h), khat(h)) in input order; deterministic for any thread
// count (rows are independent).
std::vector<BoundaryRow> boundary_table(const std::vector<double>& h_values,
                                        const ScanConfig& cfg = {}, unsigned threads = 1);

// Smallest eigenvalue of the Gram matrix G_ij = R(points_i, points_j); an
// independent finite-dimensional witness of (non-)positive-definiteness.
// psd = (min eigenvalue >= -jitter_tol * max diagonal entry).
PsdProbe gram_psd_probe(kernels::KernelId kid, const kernels::Params& p,
                        const std::vector<double>& points, double jitter_tol = 1e-10);

// Full decision pipeline on the half-line: necessary conditions, the K = 1
// fBm line, the known zone H <= 1, the covariance bound, then the spectral
// criterion where applicable.
Verdict check_existence(const kernels::Params& p, const ScanConfig& cfg = {});

}  // namespace bfbm::existence
