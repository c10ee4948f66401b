#include "bfbm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bfbm/errors.hpp"
#include "bfbm/existence.hpp"
#include "bfbm/kernels.hpp"
#include "bfbm/simulate.hpp"
#include "bfbm/spectra.hpp"

namespace bfbm::cli {

namespace {

using nlohmann::ordered_json;

// 17 significant digits: doubles round-trip exactly through the CSV
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

kernels::KernelId parse_kind(const std::string& kind) {
    if (kind == "bfbm") return kernels::KernelId::BfBm;
    if (kind == "fbm") return kernels::KernelId::FBm;
    if (kind == "antisym") return kernels::KernelId::AntiSymFBm;
    if (kind == "ln") return kernels::KernelId::LeiNualart;
    if (kind == "lnr") return kernels::KernelId::LeiNualartRescaled;
    if (kind == "bernstein") return kernels::KernelId::BernsteinGeneric;
    throw DomainError("unknown kernel kind \"" + kind + "\"");
}

struct Opts {
    bool json = false;
    std::string kind;
    double h = 0.5;
    double k = 1.0;
    double s = 0.0;
    double t = 0.0;
    double tau = 0.0;
    bool stationary = false;
    double u_min = 0.0;
    double u_max = 50.0;
    double u_step = 0.01;
    double k_tol = 1e-3;
    bool refine = false;
    std::vector<double> table_h;
    std::string method;
    double t_max = 1.0;
    std::size_t n_points = 100;
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    std::string points_file;
    std::string log_grid;
};

unsigned resolve_threads(std::size_t rows) {
    unsigned cap = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BFBM_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end == env || *end != '\0' || v == 0 || v > 1024)
            throw DomainError("BFBM_THREADS must be a positive integer (at most 1024)");
        cap = static_cast<unsigned>(v);
    }
    return static_cast<unsigned>(std::min<std::size_t>(cap, std::max<std::size_t>(rows, 1)));
}

int cmd_cov(const Opts& o, std::ostream& out) {
    const kernels::Params p(o.h, o.k);
    if (o.stationary) {
        const double value = kernels::stat_cov(parse_kind(o.kind), p, o.tau);
        if (o.json)
            out << ordered_json{{"kind", o.kind}, {"h", o.h},     {"k", o.k},
                                {"tau", o.tau},  {"value", value}}
                       .dump()
                << "\n";
        else
            out << o.kind << ',' << fmt(o.h) << ',' << fmt(o.k) << ',' << fmt(o.tau) << ','
                << fmt(value) << "\n";
        return 0;
    }
    double value = 0.0;
    if (o.kind == "bernstein") {
        // f(x) = x^K over the variance scale sig2(t) = |t|^{2H}; this is the
        // unnormalized bifractional form 2^K R_B
        const auto spec = kernels::power_bernstein(
            o.k, [h = o.h](double t) { return std::pow(std::abs(t), 2.0 * h); });
        value = kernels::cov_bernstein(spec, o.s, o.t);
    } else {
        value = kernels::kernel_value(parse_kind(o.kind), p, o.s, o.t);
    }
    if (o.json)
        out << ordered_json{{"kind", o.kind}, {"h", o.h}, {"k", o.k},
                            {"s", o.s},       {"t", o.t}, {"value", value}}
                   .dump()
            << "\n";
    else
        out << o.kind << ',' << fmt(o.h) << ',' << fmt(o.k) << ',' << fmt(o.s) << ','
            << fmt(o.t) << ',' << fmt(value) << "\n";
    return 0;
}

double eval_spectrum(const Opts& o, double u) {
    if (o.kind == "fou") return spectra::f_ou(o.h, u);
    if (o.kind == "fou-series") return spectra::f_ou_series(o.h, u);
    if (o.kind == "ln") return spectra::f_ln(o.k, u);
    if (o.kind == "lnr") return spectra::f_ln_rescaled(kernels::Params(o.h, o.k), u);
    if (o.kind == "k0-f1") return spectra::f_limit_k0(spectra::LimitPart::F1, o.h, u);
    if (o.kind == "k0-f2") return spectra::f_limit_k0(spectra::LimitPart::F2, o.h, u);
    throw DomainError("unknown spectrum kind \"" + o.kind + "\"");
}

int cmd_spectrum(const Opts& o, std::ostream& out) {
    if (!(std::isfinite(o.u_min) && std::isfinite(o.u_max) && o.u_step > 0.0))
        throw DomainError("spectrum: requires finite u bounds and --u-step > 0");
    if (o.u_max < o.u_min) throw DomainError("spectrum: requires --u-max >= --u-min");
    const double count = std::floor((o.u_max - o.u_min) / o.u_step + 1e-9);
    if (count > 1e7) throw DomainError("spectrum: more than 1e7 grid points");
    const auto n = static_cast<std::size_t>(count);
    for (std::size_t i = 0; i <= n; ++i) {
        const double u = o.u_min + static_cast<double>(i) * o.u_step;
        const double f = eval_spectrum(o, u);
        if (o.json)
            out << ordered_json{{"u", u}, {"f", f}}.dump() << "\n";
        else
            out << fmt(u) << ',' << fmt(f) << "\n";
    }
    return 0;
}

std::string status_token(existence::Status s) {
    switch (s) {
        case existence::Status::Exists:
            return "exists";
        case existence::Status::NotExists:
            return "not-exists";
        default:
            return "boundary-undecided";
    }
}

std::string reason_token(existence::Reason r) {
    switch (r) {
        case existence::Reason::PropNecessary:
            return "necessary-conditions";
        case existence::Reason::CovarianceBound:
            return "covariance-bound";
        case existence::Reason::SpectralCriterion:
            return "spectral-criterion";
        case existence::Reason::FbmLine:
            return "fbm-line";
        default:
            return "known-zone";
    }
}

std::string reason_label(existence::Reason r) {
    switch (r) {
        case existence::Reason::PropNecessary:
            return "necessary conditions";
        case existence::Reason::CovarianceBound:
            return "covariance bound";
        case existence::Reason::SpectralCriterion:
            return "spectral criterion";
        case existence::Reason::FbmLine:
            return "fBm line";
        default:
            return "known zone";
    }
}

std::string human_verdict(const existence::Verdict& v, const existence::ScanConfig& cfg) {
    using existence::Reason;
    using existence::Status;
    if (v.status == Status::Exists) {
        if (v.reason == Reason::SpectralCriterion)
            return "exists (spectral criterion, u in [0, " + fmt_short(cfg.u_max) + "])";
        if (v.reason == Reason::FbmLine) return "exists (fBm line, K = 1)";
        return "exists (known zone, H <= 1)";
    }
    if (v.status == Status::NotExists) {
        std::string line = "does not exist (" + reason_label(v.reason) + ")";
        if (!v.witness) return line;
        const existence::Witness& w = *v.witness;
        if (v.reason == Reason::SpectralCriterion)
            return line + ": witness u = " + fmt_short(w.coordinate) + ", " + w.inequality +
                   " violated";
        if (v.reason == Reason::CovarianceBound)
            return line + ": sup = " + fmt_short(w.lhs) + " > 1 at tau = " +
                   fmt_short(w.coordinate);
        return line + ": " + w.inequality + " violated (" + fmt_short(w.lhs) + " > " +
               fmt_short(w.rhs) + ")";
    }
    return "boundary undecided (" + reason_label(v.reason) +
           " passed; no applicable existence criterion)";
}

int cmd_check(const Opts& o, std::ostream& out) {
    existence::ScanConfig cfg;
    cfg.u_max = o.u_max;
    cfg.u_step = o.u_step;
    cfg.refine = o.refine;
    const existence::Verdict v = existence::check_existence(kernels::Params(o.h, o.k), cfg);
    ordered_json j;
    j["status"] = status_token(v.status);
    j["reason"] = reason_token(v.reason);
    if (v.witness) {
        j["witness_u"] = v.witness->coordinate;
        j["gap"] = v.witness->lhs - v.witness->rhs;
    } else {
        j["witness_u"] = nullptr;
        j["gap"] = nullptr;
    }
    if (!o.json) out << human_verdict(v, cfg) << "\n";
    out << j.dump() << "\n";
    return v.status == existence::Status::NotExists ? 2 : 0;
}

int cmd_khat(const Opts& o, std::ostream& out) {
    existence::ScanConfig cfg;
    cfg.k_tol = o.k_tol;
    const double value = existence::khat(o.h, cfg);
    if (o.json)
        out << ordered_json{{"h", o.h}, {"k_hat", value}}.dump() << "\n";
    else
        out << fmt(o.h) << ',' << fmt(value) << "\n";
    return 0;
}

int cmd_kbar(const Opts& o, std::ostream& out) {
    existence::ScanConfig cfg;
    cfg.k_tol = o.k_tol;
    cfg.u_max = o.u_max;
    cfg.u_step = o.u_step;
    const double value = existence::kbar(o.h, cfg);
    if (o.json)
        out << ordered_json{{"h", o.h}, {"k_bar", value}}.dump() << "\n";
    else
        out << fmt(o.h) << ',' << fmt(value) << "\n";
    return 0;
}

int cmd_table(const Opts& o, std::ostream& out) {
    existence::ScanConfig cfg;
    cfg.k_tol = o.k_tol;
    cfg.u_max = o.u_max;
    cfg.u_step = o.u_step;
    const unsigned threads = resolve_threads(o.table_h.size());
    const auto rows = existence::boundary_table(o.table_h, cfg, threads);
    for (const auto& r : rows) {
        if (o.json)
            out << ordered_json{{"h", r.h}, {"k_bar", r.k_bar}, {"k_hat", r.k_hat}}.dump()
                << "\n";
        else
            out << fmt(r.h) << ',' << fmt(r.k_bar) << ',' << fmt(r.k_hat) << "\n";
    }
    return 0;
}

int cmd_simulate(const Opts& o, std::ostream& out) {
    if (!(std::isfinite(o.t_max) && o.t_max > 0.0))
        throw DomainError("simulate: requires --t-max > 0");
    if (o.n_points < 1 || o.n_points > 4096)
        throw DomainError("simulate: requires 1 <= --n-points <= 4096");
    if (o.n_paths < 1 || o.n_paths > 1000000)
        throw DomainError("simulate: requires 1 <= --paths <= 1e6");

    const double dt = o.t_max / static_cast<double>(o.n_points);
    std::vector<double> times(o.n_points);
    for (std::size_t i = 0; i < o.n_points; ++i)
        times[i] = dt * static_cast<double>(i + 1);

    const simulate::RngSpec rng{o.seed, "mt19937_64-box-muller"};
    std::vector<simulate::PathSample> paths;
    if (o.method == "cholesky") {
        paths = simulate::sample_cholesky_paths(kernels::KernelId::BfBm,
                                                kernels::Params(o.h, o.k), times, rng,
                                                o.n_paths);
    } else if (o.method == "decomp") {
        paths = simulate::sample_decomposition_paths(kernels::Params(o.h, o.k), times, rng,
                                                     o.n_paths);
    } else if (o.method == "h1series") {
        if (o.h != 1.0)
            throw DomainError("simulate: --method h1series requires --h 1 (the series is "
                              "the H = 1 boundary representation)");
        paths = simulate::sample_h1_series_paths(o.k, times, rng, o.n_paths);
    } else {
        throw DomainError("unknown method \"" + o.method + "\"");
    }
    for (std::size_t pid = 0; pid < paths.size(); ++pid)
        for (std::size_t j = 0; j < times.size(); ++j) {
            if (o.json)
                out << ordered_json{{"path_id", pid},
                                    {"t", paths[pid].times[j]},
                                    {"value", paths[pid].values[j]}}
                           .dump()
                    << "\n";
            else
                out << pid << ',' << fmt(paths[pid].times[j]) << ','
                    << fmt(paths[pid].values[j]) << "\n";
        }
    return 0;
}

std::vector<double> probe_points(const Opts& o) {
    if (!o.points_file.empty()) {
        std::ifstream in(o.points_file);
        if (!in) throw DomainError("psd-probe: cannot open \"" + o.points_file + "\"");
        std::vector<double> points;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(line, &used);
            } catch (const std::exception&) {
                throw DomainError("psd-probe: bad number \"" + line + "\" in points file");
            }
            while (used < line.size() && std::isspace(static_cast<unsigned char>(line[used])))
                ++used;
            if (used != line.size())
                throw DomainError("psd-probe: bad number \"" + line + "\" in points file");
            points.push_back(v);
        }
        return points;
    }
    // --log-grid N,LO,HI
    unsigned long n = 0;
    double lo = 0.0, hi = 0.0;
    char trailing = '\0';
    if (std::sscanf(o.log_grid.c_str(), "%lu,%lf,%lf%c", &n, &lo, &hi, &trailing) != 3)
        throw DomainError("psd-probe: --log-grid expects N,LO,HI");
    if (n < 1 || n > 4096 || !(lo > 0.0) || !(hi > lo) || !std::isfinite(hi))
        throw DomainError("psd-probe: --log-grid requires 1 <= N <= 4096 and 0 < LO < HI");
    std::vector<double> points(n);
    if (n == 1) {
        points[0] = lo;
    } else {
        const double step = std::log(hi / lo) / static_cast<double>(n - 1);
        for (unsigned long i = 0; i < n; ++i)
            points[i] = lo * std::exp(static_cast<double>(i) * step);
        points[n - 1] = hi;  // pin the endpoint against rounding
    }
    return points;
}

int cmd_psd_probe(const Opts& o, std::ostream& out) {
    const auto probe =
        existence::gram_psd_probe(parse_kind(o.kind), kernels::Params(o.h, o.k),
                                  probe_points(o));
    if (o.json)
        out << ordered_json{{"min_eigenvalue", probe.min_eigenvalue}, {"psd", probe.psd}}
                   .dump()
            << "\n";
    else
        out << fmt(probe.min_eigenvalue) << ',' << (probe.psd ? "true" : "false") << "\n";
    return 0;
}

int cmd_fourier_check(const Opts& o, std::ostream& out) {
    const kernels::Params p(o.h, o.k);
    const kernels::KernelId kid = parse_kind(o.kind);
    const double quad = spectra::fourier_check(kid, p, o.tau);
    const double closed = kernels::stat_cov(kid, p, o.tau);
    const double abs_err = std::abs(quad - closed);
    if (o.json)
        out << ordered_json{{"tau", o.tau},
                            {"quadrature", quad},
                            {"closed_form", closed},
                            {"abs_err", abs_err}}
                   .dump()
            << "\n";
    else
        out << fmt(o.tau) << ',' << fmt(quad) << ',' << fmt(closed) << ',' << fmt(abs_err)
            << "\n";
    return 0;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    Opts o;
    CLI::App app{"bifractional Brownian motion: kernels, spectra, existence, simulation",
                 "bfbm"};
    app.require_subcommand(1);
    // the default help flag is -h,--help; -h must stay free for the H parameter
    app.set_help_flag("--help", "print this help message and exit");
    app.add_flag("--json", o.json, "emit JSON lines instead of CSV");
    const auto add_json = [&](CLI::App* sub) {
        sub->set_help_flag("--help", "print this help message and exit");
        sub->add_flag("--json", o.json, "emit JSON lines instead of CSV");
    };

    CLI::App* cov = app.add_subcommand("cov", "evaluate a covariance kernel");
    add_json(cov);
    cov->add_option("--kind", o.kind, "bfbm|fbm|antisym|ln|lnr|bernstein")->required();
    cov->add_option("--h", o.h, "H parameter (default 0.5)");
    cov->add_option("--k", o.k, "K parameter (default 1)");
    cov->add_option("--s", o.s, "first time point");
    cov->add_option("--t", o.t, "second time point");
    cov->add_flag("--stationary", o.stationary, "evaluate the Lamperti-stationary form");
    cov->add_option("--tau", o.tau, "log-time lag (with --stationary)");

    CLI::App* spectrum = app.add_subcommand("spectrum", "tabulate a spectral density");
    add_json(spectrum);
    spectrum->add_option("--kind", o.kind, "fou|fou-series|ln|lnr|k0-f1|k0-f2")->required();
    spectrum->add_option("--h", o.h, "H parameter (default 0.5)");
    spectrum->add_option("--k", o.k, "K parameter (default 1)");
    spectrum->add_option("--u-min", o.u_min, "grid start (default 0)");
    spectrum->add_option("--u-max", o.u_max, "grid end (default 50)");
    spectrum->add_option("--u-step", o.u_step, "grid step (default 0.01)");

    CLI::App* check = app.add_subcommand("check", "existence verdict for (H, K)");
    add_json(check);
    check->add_option("--h", o.h, "H parameter")->required();
    check->add_option("--k", o.k, "K parameter")->required();
    check->add_option("--u-max", o.u_max, "spectral scan box (default 50)");
    check->add_option("--u-step", o.u_step, "spectral scan step (default 0.01)");
    check->add_flag("--refine", o.refine, "re-scan around the minimum gap at step/10");

    CLI::App* khat = app.add_subcommand("khat", "covariance upper bound K-hat(H)");
    add_json(khat);
    khat->add_option("--h", o.h, "H parameter (>= 1)")->required();
    khat->add_option("--k-tol", o.k_tol, "bisection accuracy (default 0.001)");

    CLI::App* kbar = app.add_subcommand("kbar", "spectral existence boundary K-bar(H)");
    add_json(kbar);
    kbar->add_option("--h", o.h, "H parameter (> 1)")->required();
    kbar->add_option("--k-tol", o.k_tol, "bisection accuracy (default 0.001)");
    kbar->add_option("--u-max", o.u_max, "spectral scan box (default 50)");
    kbar->add_option("--u-step", o.u_step, "spectral scan step (default 0.01)");

    CLI::App* table = app.add_subcommand("table", "boundary rows h,k_bar,k_hat");
    add_json(table);
    table->add_option("--h", o.table_h, "H value (repeatable)")->required();
    table->add_option("--k-tol", o.k_tol, "bisection accuracy (default 0.001)");
    table->add_option("--u-max", o.u_max, "spectral scan box (default 50)");
    table->add_option("--u-step", o.u_step, "spectral scan step (default 0.01)");

    CLI::App* simulate = app.add_subcommand("simulate", "sample seeded paths");
    add_json(simulate);
    simulate->add_option("--method", o.method, "cholesky|decomp|h1series")->required();
    simulate->add_option("--h", o.h, "H parameter")->required();
    simulate->add_option("--k", o.k, "K parameter")->required();
    simulate->add_option("--t-max", o.t_max, "time horizon (default 1)");
    simulate->add_option("--n-points", o.n_points, "grid points per path (default 100)");
    simulate->add_option("--paths", o.n_paths, "number of paths (default 1)");
    simulate->add_option("--seed", o.seed, "RNG seed (default 0)");

    CLI::App* psd = app.add_subcommand("psd-probe", "smallest Gram eigenvalue at points");
    add_json(psd);
    psd->add_option("--kind", o.kind, "bfbm|fbm|antisym|ln|lnr")->required();
    psd->add_option("--h", o.h, "H parameter (default 0.5)");
    psd->add_option("--k", o.k, "K parameter (default 1)");
    psd->add_option("--points-file", o.points_file, "file with one time point per line");
    psd->add_option("--log-grid", o.log_grid, "N,LO,HI log-spaced points");

    CLI::App* fourier = app.add_subcommand("fourier-check",
                                           "quadrature vs closed-form stationary covariance");
    add_json(fourier);
    fourier->add_option("--kind", o.kind, "fbm|ln|lnr")->required();
    fourier->add_option("--h", o.h, "H parameter (default 0.5)");
    fourier->add_option("--k", o.k, "K parameter (default 1)");
    fourier->add_option("--tau", o.tau, "log-time lag")->required();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
        const auto parsed = app.get_subcommands();
        out << (parsed.empty() ? app.help() : parsed.front()->help());
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        if (name == "cov") {
            if (o.stationary) {
                if (sub->count("--tau") == 0)
                    throw DomainError("cov: --stationary requires --tau");
                if (sub->count("--s") != 0 || sub->count("--t") != 0)
                    throw DomainError("cov: --stationary excludes --s/--t");
            } else {
                if (sub->count("--s") == 0 || sub->count("--t") == 0)
                    throw DomainError("cov: requires --s and --t (or --stationary --tau)");
                if (sub->count("--tau") != 0)
                    throw DomainError("cov: --tau requires --stationary");
            }
            return cmd_cov(o, out);
        }
        if (name == "spectrum") return cmd_spectrum(o, out);
        if (name == "check") return cmd_check(o, out);
        if (name == "khat") return cmd_khat(o, out);
        if (name == "kbar") return cmd_kbar(o, out);
        if (name == "table") return cmd_table(o, out);
        if (name == "simulate") return cmd_simulate(o, out);
        if (name == "psd-probe") {
            if ((sub->count("--points-file") == 0) == (sub->count("--log-grid") == 0))
                throw DomainError(
                    "psd-probe: exactly one of --points-file or --log-grid is required");
            return cmd_psd_probe(o, out);
        }
        if (name == "fourier-check") return cmd_fourier_check(o, out);
        err << "error: unknown command \"" << name << "\"\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace bfbm::cli
