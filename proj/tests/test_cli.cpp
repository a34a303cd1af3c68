// Unit tests for the command-line configuration and subcommands.

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "hopskit/bcf.hpp"
#include "hopskit/stocproc.hpp"

using namespace hops;
using namespace hops::cli;

namespace {

CliConfig ini(const std::string& text) {
    std::istringstream is(text);
    return parse_ini(is, "test");
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("hopskit_cli_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

const char* kFree = R"(
[system]
epsilon = 0
delta = 1
[bath]
alpha = 0
[fit]
terms = 0 0 1 0
[hierarchy]
k_max = 1
rtol = 1e-10
atol = 1e-12
[ensemble]
n_samples = 3
t_max = 5
dt = 0.1
)";

}  // namespace

TEST_CASE("INI defaults and explicit values") {
    const auto d = ini("");
    CHECK(d.params.delta == 1.0);
    CHECK(d.params.epsilon == 0.0);
    CHECK(std::isinf(d.params.beta));
    CHECK(d.run.mode == Mode::nonlinear);
    CHECK(d.run.t_grid.front() == 0.0);
    CHECK(d.run.t_grid.back() == doctest::Approx(15.0));
    CHECK(d.run.thermal->beta == d.params.beta);
    CHECK(d.run.model.psi0(0) == cplx(1.0));

    const auto c = ini(R"(
[system]
epsilon = 2.5
psi0 = plus
[bath]
s = 0.5
omega_c = 10
alpha = 0.2
[fit]
n_terms = 7
tau0 = 2
[hierarchy]
k_max = 6
mode = linear
[ensemble]
n_samples = 123
seed = 9
t_max = 4
dt = 0.5
[thermal]
temperature = 2
method = full_kernel
[me]
variant = extended
skip_omega0 = true
)");
    CHECK(c.params.epsilon == 2.5);
    CHECK(c.params.sd.alpha == 0.2);
    CHECK(c.params.beta == 0.5);
    CHECK(c.fit.n_terms == 7);
    CHECK(c.fit.max_rate == 50.0);
    CHECK(c.run.k_max == 6);
    CHECK(c.run.mode == Mode::linear);
    CHECK(c.run.n_samples == 123);
    CHECK(c.run.master_seed == 9);
    CHECK(c.run.t_grid.size() == 9);
    CHECK(c.run.thermal_method == ThermalMethod::full_kernel);
    CHECK(c.me.variant == MeVariant::extended);
    CHECK(c.me.skip_omega0);
    CHECK(std::abs(c.run.model.psi0(1)) == doctest::Approx(std::sqrt(0.5)));
    CHECK(c.run.model.h_sys(0, 0) == cplx(2.5));

    CHECK(ini("[thermal]\nbeta = inf\n").params.beta == kInfiniteBeta);
    CHECK(ini("[thermal]\nbeta = 4\n").params.beta == 4.0);
}

TEST_CASE("INI rejects unknown keys and inconsistent values") {
    CHECK_THROWS_AS(ini("[system]\ngamma = 1\n"), ConfigError);
    CHECK_THROWS_AS(ini("[plot]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(ini("[bath]\nalpha = strong\n"), ConfigError);
    CHECK_THROWS_AS(ini("[bath]\nalpha = -1\n"), ConfigError);
    CHECK_THROWS_AS(ini("[hierarchy]\nmode = quantum\n"), ConfigError);
    CHECK_THROWS_AS(ini("[thermal]\ntemperature = 1\nbeta = 1\n"), ConfigError);
    CHECK_THROWS_AS(ini("[thermal]\nmethod = exact\n"), ConfigError);
    CHECK_THROWS_AS(ini("[system]\nepsilon = 0\ndelta = 0\n"), ConfigError);
    CHECK_THROWS_AS(ini("[system]\npsi0 = left\n"), ConfigError);
    CHECK_THROWS_AS(ini("[fit]\nterms = 1 0 -1 0\n"), ConfigError);
    CHECK_THROWS_AS(ini("[fit]\nterms = 1 0 1\n"), ConfigError);
    CHECK_THROWS_AS(ini("[ensemble]\ndt = 0\n"), ConfigError);
    CHECK_THROWS_AS(load_ini("/nonexistent/file.ini"), ConfigError);
}

TEST_CASE("inline terms, overrides and named configurations") {
    auto c = ini("[fit]\nterms = 1 0.5 2 3; 0.25 0 4 -1\n");
    REQUIRE(c.fit_terms);
    REQUIRE(c.fit_terms->size() == 2);
    CHECK(c.fit_terms->terms[0].G == cplx(1.0, 0.5));
    CHECK(c.fit_terms->terms[1].W == cplx(4.0, -1.0));
    std::ostringstream log;
    const auto fit = resolve_fit(c, log);
    CHECK(fit.tolerance_met);
    CHECK(!fit.report);
    CHECK(fit.bcf.size() == 2);

    Overrides o;
    o.samples = 17;
    o.seed = 3;
    o.mode = "linear";
    o.k_max = 2;
    o.skip_omega0 = true;
    o.variant = "extended";
    apply(c, o);
    CHECK(c.run.n_samples == 17);
    CHECK(c.run.master_seed == 3);
    CHECK(c.run.mode == Mode::linear);
    CHECK(c.run.k_max == 2);
    CHECK(c.me.skip_omega0);
    CHECK(c.me.variant == MeVariant::extended);
    o.variant = "exact";
    CHECK_THROWS_AS(apply(c, o), ConfigError);

    const auto n = from_named("fig10-alpha020-T0");
    CHECK(n.run.k_max == 9);
    CHECK(n.reference == "fixtures/mlmctdh/fig10-alpha020-T0.csv");
    CHECK_THROWS_AS(from_named("no-such-label"), ConfigError);

    std::ostringstream list;
    CHECK(cmd_configs("", list) == kOk);
    CHECK(list.str().find("fig3-eps0-T0") != std::string::npos);
}

TEST_CASE("compare interpolates and rejects disjoint ranges") {
    SigmaZSeries a{{0.0, 1.0, 2.0}, {1.0, 0.0, -1.0}, {}};
    CHECK(compare_series(a, a, 0.0, 10.0).max_deviation == 0.0);
    SigmaZSeries b{{0.0, 2.0}, {1.0, -1.0}, {}};
    const auto c = compare_series(a, b, 0.0, 10.0);
    CHECK(c.points == 3);
    CHECK(c.max_deviation == doctest::Approx(0.0).epsilon(1e-15));
    SigmaZSeries shifted{{0.0, 1.0, 2.0}, {1.5, 0.0, -1.0}, {}};
    const auto d = compare_series(shifted, a, 0.0, 10.0);
    CHECK(d.max_deviation == doctest::Approx(0.5));
    CHECK(d.rms_deviation == doctest::Approx(0.5 / std::sqrt(3.0)));
    CHECK(compare_series(shifted, a, 0.5, 10.0).max_deviation == 0.0);
    SigmaZSeries late{{5.0, 6.0}, {0.0, 0.0}, {}};
    CHECK_THROWS_AS(compare_series(a, late, 0.0, 10.0), ConfigError);
}

TEST_CASE("run writes a reproducible result for free evolution") {
    auto c = ini(kFree);
    const auto dir = scratch("run");
    c.out_dir = dir.string();
    std::ostringstream out, log;
    REQUIRE(cmd_run(c, out, log, false) == kOk);
    CHECK(out.str().find("final <sigma_z>") != std::string::npos);
    std::ifstream is(dir / "test.csv");
    const auto sz = read_sigma_z_csv(is);
    REQUIRE(sz.t.size() == 51);
    for (std::size_t i = 0; i < sz.t.size(); ++i) CHECK(std::abs(sz.sigma_z[i] - std::cos(2.0 * sz.t[i])) < 1e-6);
    std::ifstream side(dir / "test.json");
    const auto j = json::parse(side);
    CHECK(j.at("label") == "test");
    CHECK(j.at("config").at("k_max") == 1);

    std::ostringstream cmp;
    const auto csv = (dir / "test.csv").string();
    CHECK(cmd_compare(csv, csv, 0.0, 0.0, 100.0, cmp) == kOk);
    std::filesystem::remove_all(dir);
}

TEST_CASE("master equation command: inactive channel and divergence guard") {
    auto c = ini("[bath]\ns = 1\nomega_c = 100\nalpha = 0.01\n[ensemble]\nt_max = 2\n");
    const auto dir = scratch("me");
    c.out_dir = dir.string();
    std::ostringstream out, log;
    CHECK(cmd_me(c, out, log) == kOk);
    CHECK(log.str().find("l_0 = 0") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "test_me_constant.csv"));

    auto b = ini("[system]\nepsilon = 1\n[bath]\ns = 0.8\nomega_c = 100\nalpha = 0.004\n[thermal]\ntemperature = 1\n"
                 "[ensemble]\nt_max = 1\n");
    b.out_dir = dir.string();
    CHECK(cmd_me(b, out, log) == kConfigError);
    b.me.skip_omega0 = true;
    CHECK(cmd_me(b, out, log) == kOk);
    std::filesystem::remove_all(dir);
}

TEST_CASE("fit command: impossible tolerance exits with the fit code") {
    auto c = ini("[bath]\ns = 0.5\nomega_c = 10\nalpha = 0.2\n[fit]\nn_terms = 2\ntau0 = 15\n"
                 "max_rel_error = 1e-12\nrestarts = 4\ngrid_points = 200\n");
    const auto dir = scratch("fit");
    c.out_dir = dir.string();
    std::ostringstream out, log;
    CHECK(cmd_fit(c, 2, 2, out, log) == kFitTolerance);
    CHECK(std::filesystem::exists(dir / "test.fit"));
    CHECK(std::filesystem::exists(dir / "test.fit.json"));

    auto f = c;
    f.fit_file = (dir / "test.fit").string();
    const auto r = resolve_fit(f, log);
    CHECK(r.bcf.size() == 2);
    std::filesystem::remove_all(dir);
}

TEST_CASE("noise check accepts the generator and rejects a wrong kernel") {
    const auto sd = OhmicSpectralDensity::make(0.5, 10.0, 0.2);
    const auto good = check_noise(zero_temp_spectrum(sd), [&](double t) { return bcf_zero_temp(sd, t); }, 5.0, 1e-2,
                                  2000, 5, 8);
    CHECK(good.passed());
    const auto bad = check_noise(zero_temp_spectrum(sd), [&](double t) { return 2.0 * bcf_zero_temp(sd, t); }, 5.0,
                                 1e-2, 2000, 5, 8);
    CHECK(!bad.passed());
}
