// ensemble.cpp - Monte-Carlo trajectory ensembles and reduced density matrices

#include "hopskit/ensemble.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

#include "hopskit/master_eq.hpp"
#include "hopskit/parallel.hpp"
#include "hopskit/serialize.hpp"

namespace hops {

const char* to_string(ThermalMethod m) noexcept {
    switch (m) {
        case ThermalMethod::shift: return "shift";
        case ThermalMethod::full_kernel: return "full_kernel";
        case ThermalMethod::real_kernel: return "real_kernel";
    }
    return "?";
}

ThermalMethod thermal_method_from_string(const std::string& s) {
    if (s == "shift") return ThermalMethod::shift;
    if (s == "full_kernel") return ThermalMethod::full_kernel;
    if (s == "real_kernel") return ThermalMethod::real_kernel;
    throw ConfigError("unknown thermal method '" + s + "' (shift, full_kernel, real_kernel)");
}

void RunConfig::validate() const {
    if (t_grid.empty() || t_grid.front() != 0.0) throw DomainError("run config: t_grid must start at 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("run config: t_grid must be strictly increasing");
    if (n_samples < 1) throw DomainError("run config: n_samples must be >= 1");
    if (k_max < 0) throw DomainError("run config: k_max must be >= 0");
    if (fit.size() == 0) throw DomainError("run config: empty fit");
    if (!(noise_abstol > 0.0)) throw DomainError("run config: noise_abstol must be > 0");
    if (model.h_sys.rows() == 0) throw DomainError("run config: missing system model");
    if (thermal) thermal->validate();
    if (thermal_method != ThermalMethod::shift && !(thermal && thermal->enabled()))
        throw DomainError("run config: kernel thermal methods need a finite thermal beta");
}

namespace {

std::size_t entries(int d) { return 2 * static_cast<std::size_t>(d) * d; }

// Shared, immutable per-run data; trajectories only read it.
class Runner {
public:
    explicit Runner(const RunConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        const double t_max = cfg_.t_grid.back();
        if (cfg_.sd.alpha > 0.0 && t_max > 0.0) {
            z_plan_ = std::make_shared<NoisePlan>(plan_noise(zero_temp_spectrum(cfg_.sd), t_max, cfg_.noise_abstol));
            if (cfg_.thermal && cfg_.thermal->enabled()) y_plan_ = make_thermal_plan(cfg_.sd, *cfg_.thermal, t_max);
        }
    }

    TrajectoryResult trajectory(std::size_t local) const {
        const std::uint64_t base = 4 * static_cast<std::uint64_t>(cfg_.first_sample + local);
        const std::uint64_t seed = cfg_.master_seed;
        const std::uint64_t tseed = seed + (cfg_.thermal ? cfg_.thermal->seed_offset : 0);
        auto sample = [](const std::shared_ptr<const NoisePlan>& plan, std::uint64_t s, std::uint64_t stream) {
            return std::make_shared<const StochasticProcess>(sample_process(plan, s, stream));
        };
        NoiseFn noise;
        HamiltonianShift shift;
        if (z_plan_) {
            const auto z0 = sample(z_plan_, seed, base);
            switch (cfg_.thermal_method) {
                case ThermalMethod::shift:
                    noise = [z0](double t) { return (*z0)(t); };
                    if (y_plan_) shift = thermal_shift(cfg_.model, sample(y_plan_, tseed, base + 2));
                    break;
                case ThermalMethod::full_kernel:
                    noise = full_temperature_noise(z0, sample(y_plan_, tseed, base + 2), sample(y_plan_, tseed, base + 3));
                    break;
                case ThermalMethod::real_kernel:
                    noise = real_kernel_noise(z0, sample(z_plan_, seed, base + 1), sample(y_plan_, tseed, base + 2),
                                              sample(y_plan_, tseed, base + 3));
                    break;
            }
        }
        return propagate_trajectory(cfg_.model, cfg_.fit, noise, cfg_.mode, cfg_.k_max, cfg_.t_grid, cfg_.integrator,
                                    shift);
    }

    const RunConfig& config() const noexcept { return cfg_; }

private:
    RunConfig cfg_;
    std::shared_ptr<const NoisePlan> z_plan_;
    std::shared_ptr<const NoisePlan> y_plan_;
};

// Projector entries (Re P, Im P) per output time; nonlinear mode normalizes ψ.
std::vector<Eigen::VectorXd> projector_samples(const TrajectoryResult& tr, int d) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(tr.times.size());
    const std::size_t half = entries(d) / 2;
    for (const auto& psi_raw : tr.psi0_series) {
        CVector psi = psi_raw;
        if (tr.mode == Mode::nonlinear) psi /= psi.norm();
        Eigen::VectorXd v(entries(d));
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) {
                const cplx p = psi(i) * std::conj(psi(k));
                v(i * d + k) = p.real();
                v(half + i * d + k) = p.imag();
            }
        out.push_back(std::move(v));
    }
    return out;
}

EnsembleResult empty_result(const RunConfig& cfg) {
    EnsembleResult r;
    r.t_grid = cfg.t_grid;
    r.dim = cfg.model.dim();
    r.mode = cfg.mode;
    r.config_hash = config_hash(cfg);
    r.master_seed = cfg.master_seed;
    const auto m = static_cast<Eigen::Index>(entries(r.dim));
    r.mean.assign(cfg.t_grid.size(), Eigen::VectorXd::Zero(m));
    r.m2.assign(cfg.t_grid.size(), Eigen::MatrixXd::Zero(m, m));
    return r;
}

// One-sample update of mean and centered second moment.
void accumulate(EnsembleResult& r, const std::vector<Eigen::VectorXd>& v) {
    r.n_samples += 1;
    const double n = static_cast<double>(r.n_samples);
    for (std::size_t t = 0; t < v.size(); ++t) {
        const Eigen::VectorXd delta = v[t] - r.mean[t];
        r.mean[t] += delta / n;
        r.m2[t].noalias() += delta * (v[t] - r.mean[t]).transpose();
    }
}

}  // namespace

void EnsembleResult::finalize() {
    rho_series.assign(t_grid.size(), CMatrix::Zero(dim, dim));
    stderr_series.assign(t_grid.size(), CMatrix::Zero(dim, dim));
    if (n_samples == 0) return;
    const std::size_t half = entries(dim) / 2;
    const double n = static_cast<double>(n_samples);
    for (std::size_t t = 0; t < t_grid.size(); ++t) {
        for (int i = 0; i < dim; ++i)
            for (int k = 0; k < dim; ++k) {
                const std::size_t re = i * dim + k, im = half + re;
                rho_series[t](i, k) = cplx(mean[t](re), mean[t](im));
                if (n_samples > 1) {
                    const double vr = std::max(0.0, m2[t](re, re)) / (n - 1.0);
                    const double vi = std::max(0.0, m2[t](im, im)) / (n - 1.0);
                    stderr_series[t](i, k) = cplx(std::sqrt(vr / n), std::sqrt(vi / n));
                }
            }
    }
}

EnsembleResult merge(const EnsembleResult& a, const EnsembleResult& b) {
    if (a.t_grid != b.t_grid || a.dim != b.dim || a.mode != b.mode)
        throw DomainError("merge: ensembles differ in grid, dimension or mode");
    EnsembleResult r = a;
    r.n_samples = a.n_samples + b.n_samples;
    r.n_attempted = a.n_attempted + b.n_attempted;
    r.failures.insert(r.failures.end(), b.failures.begin(), b.failures.end());
    r.wall_time = a.wall_time + b.wall_time;
    if (a.config_hash != b.config_hash) r.config_hash = 0;
    const double na = static_cast<double>(a.n_samples), nb = static_cast<double>(b.n_samples);
    const double n = na + nb;
    if (n > 0.0) {
        for (std::size_t t = 0; t < r.t_grid.size(); ++t) {
            const Eigen::VectorXd delta = b.mean[t] - a.mean[t];
            r.mean[t] = a.mean[t] + delta * (nb / n);
            r.m2[t] = a.m2[t] + b.m2[t] + delta * delta.transpose() * (na * nb / n);
        }
    }
    r.finalize();
    return r;
}

std::vector<EnsembleResult> run_ensemble_nested(const RunConfig& cfg, const std::vector<std::size_t>& checkpoints,
                                                const ProgressFn& progress) {
    const auto start = std::chrono::steady_clock::now();
    const Runner runner(cfg);
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] == 0 || checkpoints[i] > cfg.n_samples || (i > 0 && checkpoints[i] <= checkpoints[i - 1]))
            throw DomainError("run_ensemble: checkpoints must be ascending within [1, n_samples]");
    }
    const int d = cfg.model.dim();
    EnsembleResult acc = empty_result(cfg);
    std::vector<EnsembleResult> snapshots;
    std::size_t next_checkpoint = 0;
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

    struct Slot {
        std::vector<Eigen::VectorXd> v;
        std::optional<TrajectoryFailure> failure;
    };
    const std::size_t chunk = std::max<std::size_t>(64, 4 * thread_count());
    for (std::size_t begin = 0; begin < cfg.n_samples; begin += chunk) {
        const std::size_t count = std::min(chunk, cfg.n_samples - begin);
        std::vector<Slot> slots(count);
        parallel_for(count, [&](std::size_t j) {
            const std::size_t local = begin + j;
            try {
                slots[j].v = projector_samples(runner.trajectory(local), d);
            } catch (const TrajectoryError& e) {
                slots[j].failure = TrajectoryFailure{cfg.first_sample + local, e.time, e.what()};
            }
        });
        // reduction in trajectory order, independent of scheduling
        for (std::size_t j = 0; j < count; ++j) {
            acc.n_attempted += 1;
            if (slots[j].failure)
                acc.failures.push_back(*slots[j].failure);
            else
                accumulate(acc, slots[j].v);
            if (next_checkpoint < checkpoints.size() && acc.n_attempted == checkpoints[next_checkpoint]) {
                EnsembleResult snap = acc;
                snap.wall_time = elapsed();
                snap.finalize();
                snapshots.push_back(std::move(snap));
                ++next_checkpoint;
            }
        }
        if (progress) progress(begin + count, cfg.n_samples);
    }
    acc.wall_time = elapsed();
    acc.finalize();
    if (snapshots.empty() || snapshots.back().n_attempted != acc.n_attempted) snapshots.push_back(acc);
    if (static_cast<double>(acc.failures.size()) > 0.01 * static_cast<double>(acc.n_attempted)) {
        throw EnsembleError("run_ensemble: " + std::to_string(acc.failures.size()) + " of " +
                                std::to_string(acc.n_attempted) + " trajectories failed (cap 1%)",
                            acc);
    }
    return snapshots;
}

EnsembleResult run_ensemble(const RunConfig& cfg) { return run_ensemble_nested(cfg, {}).back(); }

TrajectoryResult run_trajectory(const RunConfig& cfg, std::size_t index) {
    if (index < cfg.first_sample) throw DomainError("run_trajectory: index precedes first_sample");
    return Runner(cfg).trajectory(index - cfg.first_sample);
}

ObservableSeries observable_series(const EnsembleResult& res, const CMatrix& op) {
    const int d = res.dim;
    if (op.rows() != d || op.cols() != d) throw DomainError("observable_series: dimension mismatch");
    if ((op - op.adjoint()).norm() > 1e-12)
        std::clog << "warning: observable_series: operator is not Hermitian; returning the real part\n";
    const std::size_t half = entries(d) / 2;
    Eigen::VectorXd a(entries(d));
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            a(i * d + k) = op(k, i).real();
            a(half + i * d + k) = -op(k, i).imag();
        }
    ObservableSeries out;
    out.t = res.t_grid;
    const double n = static_cast<double>(res.n_samples);
    for (std::size_t t = 0; t < res.t_grid.size(); ++t) {
        out.value.push_back(res.n_samples > 0 ? a.dot(res.mean[t]) : 0.0);
        double se = 0.0;
        if (res.n_samples > 1) se = std::sqrt(std::max(0.0, a.dot(res.m2[t] * a)) / (n - 1.0) / n);
        out.stderr_.push_back(se);
    }
    return out;
}

ConvergenceReport convergence_report(const std::vector<EnsembleResult>& nested, const CMatrix& op) {
    ConvergenceReport rep;
    if (nested.empty()) return rep;
    std::vector<ObservableSeries> series;
    for (const auto& r : nested) series.push_back(observable_series(r, op));
    const auto& last = series.back();
    const double n_max = static_cast<double>(nested.back().n_samples);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int points = 0;
    for (std::size_t i = 0; i < nested.size(); ++i) {
        rep.n.push_back(nested[i].n_samples);
        double dev = 0.0, se = 0.0;
        for (std::size_t t = 0; t < last.value.size(); ++t) {
            dev = std::max(dev, std::abs(series[i].value[t] - last.value[t]));
            se = std::max(se, series[i].stderr_[t]);
        }
        rep.max_deviation.push_back(dev);
        rep.max_stderr.push_back(se);
        if (se > 0.0 && nested[i].n_samples > 0) {
            const double x = std::log(static_cast<double>(nested[i].n_samples)), y = std::log(se);
            sx += x, sy += y, sxx += x * x, sxy += x * y;
            ++points;
        }
    }
    if (points >= 2) rep.stderr_slope = (points * sxy - sx * sy) / (points * sxx - sx * sx);
    for (std::size_t i = 0; i + 1 < nested.size(); ++i) {
        const double scale = std::sqrt(1.0 / static_cast<double>(nested[i].n_samples) - 1.0 / n_max);
        rep.deviation_scaling.push_back(scale > 0.0 ? rep.max_deviation[i] / scale : 0.0);
    }
    if (!rep.deviation_scaling.empty() && rep.deviation_scaling.front() > 0.0) {
        const double first = rep.deviation_scaling.front();
        for (auto& v : rep.deviation_scaling) v /= first;
    }
    return rep;
}

std::uint64_t config_hash(const RunConfig& cfg) {
    const std::string text = json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace hops
