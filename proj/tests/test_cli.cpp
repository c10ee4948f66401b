#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bfbm/cli.hpp"
#include "bfbm/existence.hpp"
#include "bfbm/kernels.hpp"
#include "bfbm/simulate.hpp"
#include "bfbm/spectra.hpp"
#include "doctest.h"
#include "json.hpp"

using bfbm::kernels::cov_bfbm;
using bfbm::kernels::Params;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = bfbm::cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string f;
    while (std::getline(in, f, ',')) out.push_back(f);
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("cov emits the kind,h,k,s,t,value row") {
    const CliResult r = call({"cov", "--kind", "bfbm", "--h", "0.7", "--k", "0.8", "--s",
                              "1", "--t", "2"});
    REQUIRE(r.code == 0);
    REQUIRE(r.err.empty());
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 1);
    const auto f = fields(rows[0]);
    REQUIRE(f.size() == 6);
    CHECK(f[0] == "bfbm");
    CHECK(std::stod(f[1]) == 0.7);
    CHECK(std::stod(f[2]) == 0.8);
    CHECK(std::stod(f[3]) == 1.0);
    CHECK(std::stod(f[4]) == 2.0);
    // %.17g round-trips doubles exactly
    CHECK(std::stod(f[5]) == cov_bfbm(Params(0.7, 0.8), 1.0, 2.0));
}

TEST_CASE("cov stationary and bernstein variants") {
    const CliResult st = call({"cov", "--kind", "fbm", "--h", "0.3", "--stationary",
                               "--tau", "1.5"});
    REQUIRE(st.code == 0);
    const auto f = fields(lines(st.out).at(0));
    REQUIRE(f.size() == 5);
    CHECK(std::stod(f[3]) == 1.5);
    CHECK(std::stod(f[4]) ==
          bfbm::kernels::stat_cov(bfbm::kernels::KernelId::FBm, Params(0.3, 1.0), 1.5));

    // the bernstein kind evaluates the unnormalized form 2^K R_B
    const CliResult bs = call({"cov", "--kind", "bernstein", "--h", "0.7", "--k", "0.8",
                               "--s", "1", "--t", "2"});
    REQUIRE(bs.code == 0);
    const double value = std::stod(fields(lines(bs.out).at(0)).at(5));
    const double exact = std::exp2(0.8) * cov_bfbm(Params(0.7, 0.8), 1.0, 2.0);
    CHECK(value == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("cov flag validation") {
    CHECK(call({"cov", "--kind", "bfbm", "--h", "1", "--k", "1", "--s", "1"}).code == 1);
    CHECK(call({"cov", "--kind", "bfbm", "--h", "1", "--k", "1", "--tau", "1"}).code == 1);
    CHECK(call({"cov", "--kind", "bfbm", "--h", "1", "--k", "1", "--stationary", "--tau",
                "1", "--s", "1"})
              .code == 1);
    CHECK(call({"cov", "--kind", "nope", "--h", "1", "--k", "1", "--s", "1", "--t", "1"})
              .code == 1);
    const CliResult r = call({"cov", "--kind", "bfbm", "--h", "-1", "--k", "1", "--s", "1",
                              "--t", "1"});
    CHECK(r.code == 1);
    CHECK(r.err.find("error:") == 0);
}

TEST_CASE("spectrum grid, values, and 17-digit round-trip") {
    const CliResult r = call({"spectrum", "--kind", "fou", "--h", "0.3", "--u-min", "0",
                              "--u-max", "2", "--u-step", "0.25"});
    REQUIRE(r.code == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 9);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto f = fields(rows[i]);
        REQUIRE(f.size() == 2);
        const double u = std::stod(f[0]);
        CHECK(u == 0.25 * static_cast<double>(i));
        CHECK(std::stod(f[1]) == bfbm::spectra::f_ou(0.3, u));  // round-trip exact
    }
    CHECK(call({"spectrum", "--kind", "fou", "--h", "0.3", "--u-step", "-1"}).code == 1);
    CHECK(call({"spectrum", "--kind", "fou", "--h", "0.3", "--u-min", "1", "--u-max", "0"})
              .code == 1);
    // h = 1/2 closed form through the CLI
    const CliResult half = call({"spectrum", "--kind", "fou", "--h", "0.5", "--u-min", "1",
                                 "--u-max", "1", "--u-step", "1"});
    const double f_half = std::stod(fields(lines(half.out).at(0)).at(1));
    CHECK(f_half == doctest::Approx(2.0 / (std::numbers::pi * 5.0)).epsilon(1e-14));
}

TEST_CASE("check verdicts, exit codes, and JSON schema") {
    const CliResult yes = call({"check", "--h", "2", "--k", "0.40"});
    CHECK(yes.code == 0);
    const auto yes_lines = lines(yes.out);
    REQUIRE(yes_lines.size() == 2);
    CHECK(yes_lines[0].find("exists (spectral criterion") == 0);
    const auto jy = nlohmann::json::parse(yes_lines[1]);
    CHECK(jy.at("status") == "exists");
    CHECK(jy.at("reason") == "spectral-criterion");
    CHECK(jy.at("witness_u").is_number());
    CHECK(jy.at("gap").get<double>() < 0.0);

    const CliResult no = call({"check", "--h", "2", "--k", "0.45"});
    CHECK(no.code == 2);
    const auto jn = nlohmann::json::parse(lines(no.out).at(1));
    CHECK(jn.at("status") == "not-exists");
    CHECK(jn.at("reason") == "covariance-bound");
    CHECK(jn.at("gap").get<double>() > 0.0);

    // between k_bar(2) ~ 0.420 and k_hat(2) ~ 0.440 only the spectral
    // criterion can reject
    const CliResult mid = call({"check", "--h", "2", "--k", "0.43", "--json"});
    CHECK(mid.code == 2);
    const auto lines_mid = lines(mid.out);
    REQUIRE(lines_mid.size() == 1);  // --json suppresses the human line
    const auto jm = nlohmann::json::parse(lines_mid[0]);
    CHECK(jm.at("reason") == "spectral-criterion");
    CHECK(jm.at("witness_u").get<double>() > 0.0);

    const CliResult forbidden = call({"check", "--h", "3", "--k", "2.5"});
    CHECK(forbidden.code == 2);
    CHECK(nlohmann::json::parse(lines(forbidden.out).at(1)).at("reason") ==
          "necessary-conditions");

    const CliResult fbm_line = call({"check", "--h", "0.5", "--k", "1"});
    CHECK(fbm_line.code == 0);
    CHECK(nlohmann::json::parse(lines(fbm_line.out).at(1)).at("reason") == "fbm-line");
    CHECK(nlohmann::json::parse(lines(fbm_line.out).at(1)).at("witness_u").is_null());
}

TEST_CASE("khat and kbar agree with the library") {
    const CliResult kh = call({"khat", "--h", "2"});
    REQUIRE(kh.code == 0);
    const auto fh = fields(lines(kh.out).at(0));
    REQUIRE(fh.size() == 2);
    CHECK(std::stod(fh[0]) == 2.0);
    CHECK(std::stod(fh[1]) == bfbm::existence::khat(2.0));

    const CliResult kb = call({"kbar", "--h", "1.5", "--k-tol", "0.002"});
    REQUIRE(kb.code == 0);
    bfbm::existence::ScanConfig cfg;
    cfg.k_tol = 0.002;
    CHECK(std::stod(fields(lines(kb.out).at(0)).at(1)) == bfbm::existence::kbar(1.5, cfg));

    CHECK(call({"khat", "--h", "0.7"}).code == 1);  // khat needs h >= 1
    CHECK(call({"khat"}).code == 1);                // --h required
}

TEST_CASE("table preserves input order and is thread-count invariant") {
    const std::vector<std::string> args{"table", "--h", "2", "--h", "1.5"};
    const CliResult serial = call(args);
    REQUIRE(serial.code == 0);
    const auto rows = lines(serial.out);
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(fields(rows[0]).at(0)) == 2.0);
    CHECK(std::stod(fields(rows[1]).at(0)) == 1.5);
    // rows match the single-value commands at the same tolerances
    CHECK(fields(rows[0]).at(2) == fields(lines(call({"khat", "--h", "2"}).out).at(0)).at(1));
    CHECK(fields(rows[1]).at(1) == fields(lines(call({"kbar", "--h", "1.5"}).out).at(0)).at(1));

    setenv("BFBM_THREADS", "2", 1);
    const CliResult threaded = call(args);
    unsetenv("BFBM_THREADS");
    CHECK(threaded.out == serial.out);  // byte-identical

    setenv("BFBM_THREADS", "zero", 1);
    const CliResult bad = call(args);
    unsetenv("BFBM_THREADS");
    CHECK(bad.code == 1);
}

TEST_CASE("simulate is deterministic and matches the library sampler") {
    const std::vector<std::string> args{"simulate", "--method", "cholesky", "--h", "0.7",
                                        "--k",      "0.8",      "--t-max", "1",
                                        "--n-points", "4",      "--paths", "2",
                                        "--seed",   "7"};
    const CliResult a = call(args);
    const CliResult b = call(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);  // identical argv => byte-identical output

    const auto rows = lines(a.out);
    REQUIRE(rows.size() == 8);
    const auto paths = bfbm::simulate::sample_cholesky_paths(
        bfbm::kernels::KernelId::BfBm, Params(0.7, 0.8), {0.25, 0.5, 0.75, 1.0},
        bfbm::simulate::RngSpec{7u}, 2);
    for (std::size_t pid = 0; pid < 2; ++pid)
        for (std::size_t j = 0; j < 4; ++j) {
            const auto f = fields(rows[pid * 4 + j]);
            REQUIRE(f.size() == 3);
            CHECK(std::stoul(f[0]) == pid);
            CHECK(std::stod(f[1]) == paths[pid].times[j]);
            CHECK(std::stod(f[2]) == paths[pid].values[j]);
        }

    const CliResult other = call({"simulate", "--method", "cholesky", "--h", "0.7", "--k",
                                  "0.8", "--t-max", "1", "--n-points", "4", "--paths", "2",
                                  "--seed", "8"});
    CHECK(other.out != a.out);

    CHECK(call({"simulate", "--method", "h1series", "--h", "0.7", "--k", "0.5"}).code == 1);
    CHECK(call({"simulate", "--method", "decomp", "--h", "0.8", "--k", "1.5"}).code == 1);
    CHECK(call({"simulate", "--method", "cholesky", "--h", "0.5", "--k", "1", "--n-points",
                "9999"})
              .code == 1);
    CHECK(call({"simulate", "--method", "warp", "--h", "0.5", "--k", "1"}).code == 1);

    // decomp and h1series are reachable through the CLI
    CHECK(call({"simulate", "--method", "decomp", "--h", "0.4", "--k", "1.5", "--n-points",
                "3"})
              .code == 0);
    CHECK(call({"simulate", "--method", "h1series", "--h", "1", "--k", "0.5", "--n-points",
                "3"})
              .code == 0);
}

TEST_CASE("psd-probe reports sign and flag") {
    const CliResult bad = call({"psd-probe", "--kind", "bfbm", "--h", "2", "--k", "0.48",
                                "--log-grid", "64,0.01,100"});
    REQUIRE(bad.code == 0);
    const auto fb = fields(lines(bad.out).at(0));
    REQUIRE(fb.size() == 2);
    CHECK(std::stod(fb[0]) < -1e-3);
    CHECK(fb[1] == "false");

    const CliResult good = call({"psd-probe", "--kind", "bfbm", "--h", "0.6", "--k", "0.9",
                                 "--log-grid", "64,0.01,100"});
    REQUIRE(good.code == 0);
    CHECK(fields(lines(good.out).at(0)).at(1) == "true");

    // points file
    const auto tmp = std::filesystem::temp_directory_path() / "bfbm_cli_points.txt";
    {
        std::ofstream f(tmp);
        f << "0.5\n1.0\n2.0\n";
    }
    const CliResult file = call({"psd-probe", "--kind", "fbm", "--h", "0.5",
                                 "--points-file", tmp.string()});
    std::filesystem::remove(tmp);
    REQUIRE(file.code == 0);
    CHECK(fields(lines(file.out).at(0)).at(1) == "true");

    CHECK(call({"psd-probe", "--kind", "bfbm", "--h", "1", "--k", "1"}).code == 1);
    CHECK(call({"psd-probe", "--kind", "bfbm", "--h", "1", "--k", "1", "--log-grid",
                "4,0.1,10", "--points-file", "x"})
              .code == 1);
    CHECK(call({"psd-probe", "--kind", "bfbm", "--h", "1", "--k", "1", "--log-grid",
                "banana"})
              .code == 1);
    CHECK(call({"psd-probe", "--kind", "bfbm", "--h", "1", "--k", "1", "--points-file",
                "/nonexistent/path"})
              .code == 1);
}

TEST_CASE("fourier-check emits tau,quadrature,closed_form,abs_err") {
    const CliResult r = call({"fourier-check", "--kind", "ln", "--k", "0.5", "--tau", "1"});
    REQUIRE(r.code == 0);
    const auto f = fields(lines(r.out).at(0));
    REQUIRE(f.size() == 4);
    CHECK(std::stod(f[0]) == 1.0);
    CHECK(std::stod(f[3]) < 1e-9);
    CHECK(std::abs(std::stod(f[1]) - std::stod(f[2])) == std::stod(f[3]));
    CHECK(call({"fourier-check", "--kind", "bfbm", "--h", "0.7", "--k", "0.8", "--tau",
                "1"})
              .code == 1);
}

TEST_CASE("json mode emits one parsable object per row") {
    const CliResult cov = call({"cov", "--kind", "bfbm", "--h", "0.7", "--k", "0.8", "--s",
                                "1", "--t", "2", "--json"});
    REQUIRE(cov.code == 0);
    const auto jc = nlohmann::json::parse(lines(cov.out).at(0));
    CHECK(jc.at("kind") == "bfbm");
    CHECK(jc.at("value").get<double>() == cov_bfbm(Params(0.7, 0.8), 1.0, 2.0));

    const CliResult spec = call({"spectrum", "--kind", "ln", "--k", "0.5", "--u-min", "0",
                                 "--u-max", "1", "--u-step", "0.5", "--json"});
    const auto rows = lines(spec.out);
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        const auto j = nlohmann::json::parse(row);
        CHECK(j.at("f").get<double>() == bfbm::spectra::f_ln(0.5, j.at("u").get<double>()));
    }

    const CliResult sim = call({"simulate", "--method", "cholesky", "--h", "0.5", "--k",
                                "1", "--n-points", "2", "--json"});
    for (const auto& row : lines(sim.out)) {
        const auto j = nlohmann::json::parse(row);
        CHECK(j.at("path_id").is_number_integer());
        CHECK(j.at("value").is_number());
    }

    const CliResult probe = call({"psd-probe", "--kind", "fbm", "--h", "0.5", "--log-grid",
                                  "8,0.1,10", "--json"});
    CHECK(nlohmann::json::parse(lines(probe.out).at(0)).at("psd").is_boolean());
}

TEST_CASE("help and argument errors") {
    const CliResult help = call({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("bfbm") != std::string::npos);
    const CliResult sub_help = call({"simulate", "--help"});
    CHECK(sub_help.code == 0);
    CHECK(sub_help.out.find("--method") != std::string::npos);

    CHECK(call({}).code == 1);
    CHECK(call({"frobnicate"}).code == 1);
    CHECK(call({"khat", "--h", "2", "--bogus"}).code == 1);
    const CliResult err = call({"khat", "--h", "not-a-number"});
    CHECK(err.code == 1);
    CHECK(err.err.find("error:") == 0);
}

TEST_SUITE_END();
