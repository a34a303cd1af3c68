// main.cpp - command-line entry point of the hopskit tool

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli.hpp"
#include "hopskit/parallel.hpp"

namespace {

using namespace hops;
using namespace hops::cli;

struct Source {
    std::string config;
    std::string named;
    Overrides overrides;
};

void add_source(CLI::App* cmd, Source& src) {
    auto* c = cmd->add_option("--config", src.config, "INI configuration file")->check(CLI::ExistingFile);
    auto* n = cmd->add_option("--named", src.named, "built-in configuration label (see 'configs')");
    c->excludes(n);
    n->excludes(c);
    cmd->add_option("--samples", src.overrides.samples, "number of trajectories");
    cmd->add_option("--seed", src.overrides.seed, "master seed");
    cmd->add_option("--mode", src.overrides.mode, "linear or nonlinear");
    cmd->add_option("--kmax", src.overrides.k_max, "hierarchy depth");
    cmd->add_option("--out", src.overrides.out_dir, "output directory");
}

CliConfig load(const Source& src) {
    if (src.config.empty() && src.named.empty()) throw ConfigError("give --config or --named");
    CliConfig cfg = src.config.empty() ? from_named(src.named) : load_ini(src.config);
    apply(cfg, src.overrides);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hopskit: hierarchy of pure states for the spin-boson model"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (default: HOPSKIT_THREADS or all cores)");

    Source src;
    int n_min = 1, n_max = 0;
    std::size_t noise_samples = 5000;
    double tol = 0.0, t_min = 0.0, t_max = std::numeric_limits<double>::infinity();
    std::string file_a, file_b, show;
    bool quiet = false;

    auto* fit = app.add_subcommand("fit", "fit the bath correlation function");
    add_source(fit, src);
    fit->add_option("--nmin", n_min, "smallest number of terms");
    fit->add_option("--nmax", n_max, "largest number of terms (default: configured)");

    auto* noise = app.add_subcommand("noise", "check sampled noise correlations against the kernels");
    add_source(noise, src);
    noise->add_option("--check-samples", noise_samples, "realizations per process");

    auto* run = app.add_subcommand("run", "propagate a HOPS ensemble");
    add_source(run, src);
    run->add_flag("--quiet", quiet, "no progress output");

    auto* me = app.add_subcommand("me", "propagate the master-equation reference");
    add_source(me, src);
    me->add_flag("--skip-omega0", src.overrides.skip_omega0, "drop the omega = 0 channel");
    me->add_option("--variant", src.overrides.variant, "constant or extended");

    auto* cmp = app.add_subcommand("compare", "compare two sigma_z series");
    cmp->add_option("a", file_a, "CSV with t and sigma_z columns")->required()->check(CLI::ExistingFile);
    cmp->add_option("b", file_b, "reference CSV, interpolated onto the times of a")
        ->required()
        ->check(CLI::ExistingFile);
    cmp->add_option("--tol", tol, "maximum allowed deviation")->required();
    cmp->add_option("--tmin", t_min, "start of the compared window");
    cmp->add_option("--tmax", t_max, "end of the compared window");

    auto* configs = app.add_subcommand("configs", "list the built-in configurations");
    configs->add_option("--show", show, "print one configuration as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }
    if (threads > 0) set_thread_count(threads);

    try {
        if (fit->parsed()) {
            const CliConfig cfg = load(src);
            return cmd_fit(cfg, n_min, n_max > 0 ? n_max : cfg.fit.n_terms, std::cout, std::cerr);
        }
        if (noise->parsed()) return cmd_noise(load(src), noise_samples, std::cout, std::cerr);
        if (run->parsed()) return cmd_run(load(src), std::cout, std::cerr, !quiet);
        if (me->parsed()) return cmd_me(load(src), std::cout, std::cerr);
        if (cmp->parsed()) return cmd_compare(file_a, file_b, tol, t_min, t_max, std::cout);
        return cmd_configs(show, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kConfigError;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "json error: " << e.what() << '\n';
        return kConfigError;
    } catch (const FitError& e) {
        std::cerr << "fit error: " << e.what() << '\n';
        return kFitTolerance;
    } catch (const EnsembleError& e) {
        std::cerr << "ensemble error: " << e.what() << '\n';
        return kEnsembleFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
}
