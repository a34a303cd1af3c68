// hops.cpp - hierarchy of pure states: index set, right-hand side, trajectories

#include "hopskit/hops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/numeric/odeint.hpp>

namespace hops {

SystemModel SystemModel::make(CMatrix h_sys, CMatrix coupling_l, CVector psi0) {
    const auto d = h_sys.rows();
    if (d < 1 || h_sys.cols() != d) throw DomainError("system Hamiltonian must be square");
    if (coupling_l.rows() != d || coupling_l.cols() != d) throw DomainError("coupling operator shape mismatch");
    if (psi0.size() != d) throw DomainError("initial state dimension mismatch");
    if ((h_sys - h_sys.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw DomainError("system Hamiltonian is not Hermitian");
    if (std::abs(psi0.norm() - 1.0) > 1e-12) throw DomainError("initial state must have unit norm");
    return SystemModel{std::move(h_sys), std::move(coupling_l), std::move(psi0)};
}

namespace {

// C(n, k) with an overflow check.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<std::uint64_t>::max()) throw DomainError("hierarchy size overflows 64 bits");
    }
    return static_cast<std::uint64_t>(r);
}

// Number of k ∈ ℕ^parts with Σk = total.
std::uint64_t compositions(int total, int parts) {
    if (parts == 0) return total == 0 ? 1 : 0;
    return binomial(static_cast<std::uint64_t>(total + parts - 1), static_cast<std::uint64_t>(parts - 1));
}

}  // namespace

std::uint64_t hierarchy_size(int n_terms, int k_max) {
    if (n_terms < 1) throw DomainError("hierarchy needs N >= 1");
    if (k_max < 0) throw DomainError("hierarchy needs k_max >= 0");
    return binomial(static_cast<std::uint64_t>(n_terms + k_max), static_cast<std::uint64_t>(n_terms));
}

std::int32_t HierarchyIndexSet::position(std::span<const int> k) const {
    if (static_cast<int>(k.size()) != n_terms_) return kNone;
    int level = 0;
    for (int v : k) {
        if (v < 0) return kNone;
        level += v;
    }
    if (level > k_max_) return kNone;
    // all lower levels come first
    std::uint64_t rank = level == 0 ? 0 : hierarchy_size(n_terms_, level - 1);
    // within a level, entries with a larger leading component come first
    int remaining = level;
    for (int p = 0; p < n_terms_ && remaining > 0; ++p) {
        for (int v = k[p] + 1; v <= remaining; ++v) rank += compositions(remaining - v, n_terms_ - p - 1);
        remaining -= k[p];
    }
    return static_cast<std::int32_t>(rank);
}

HierarchyIndexSet HierarchyIndexSet::build(int n_terms, int k_max, std::uint64_t max_count) {
    const std::uint64_t count = hierarchy_size(n_terms, k_max);
    if (count > max_count || count > static_cast<std::uint64_t>(std::numeric_limits<std::int32_t>::max())) {
        throw DomainError("hierarchy N=" + std::to_string(n_terms) + ", k_max=" + std::to_string(k_max) + " has " +
                          std::to_string(count) + " states, above the budget of " + std::to_string(max_count));
    }
    HierarchyIndexSet h;
    h.n_terms_ = n_terms;
    h.k_max_ = k_max;
    h.flat_.reserve(count * n_terms);
    h.level_.reserve(count);

    std::vector<int> k(n_terms, 0);
    // compositions of `level` into N parts, leading component descending
    auto emit = [&](auto&& self, int p, int remaining, int level) -> void {
        if (p == n_terms - 1) {
            k[p] = remaining;
            h.flat_.insert(h.flat_.end(), k.begin(), k.end());
            h.level_.push_back(level);
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            k[p] = v;
            self(self, p + 1, remaining - v, level);
        }
    };
    for (int level = 0; level <= k_max; ++level) emit(emit, 0, level, level);

    h.raise_.assign(count * n_terms, kNone);
    h.lower_.assign(count * n_terms, kNone);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<int> nb(h.flat_.begin() + i * n_terms, h.flat_.begin() + (i + 1) * n_terms);
        for (int j = 0; j < n_terms; ++j) {
            ++nb[j];
            h.raise_[i * n_terms + j] = h.position(nb);
            nb[j] -= 2;
            h.lower_[i * n_terms + j] = h.position(nb);
            ++nb[j];
        }
    }
    return h;
}

std::span<const int> HierarchyIndexSet::index(std::size_t i) const {
    return std::span<const int>(flat_).subspan(i * n_terms_, n_terms_);
}

const char* to_string(Mode m) noexcept { return m == Mode::linear ? "linear" : "nonlinear"; }

HopsRhs::HopsRhs(const SystemModel& model, const ExponentialBCF& bcf, const HierarchyIndexSet& idx, Mode mode)
    : l_(model.coupling_l), l_dag_(model.coupling_l.adjoint()), mode_(mode), d_(model.dim()),
      n_(static_cast<int>(bcf.size())), m_(idx.size()) {
    if (idx.n_terms() != n_) throw DomainError("index set and BCF disagree on the number of terms");
    for (const auto& t : bcf.terms) {
        g_.push_back(t.G);
        w_.push_back(t.W);
    }
    k_dot_w_.resize(m_);
    lower_start_.push_back(0);
    raise_start_.push_back(0);
    for (std::size_t i = 0; i < m_; ++i) {
        const auto k = idx.index(i);
        cplx kw{0.0, 0.0};
        for (int j = 0; j < n_; ++j) {
            kw += static_cast<double>(k[j]) * w_[j];
            if (idx.lower(i, j) != HierarchyIndexSet::kNone) {
                lower_src_.push_back(idx.lower(i, j));
                lower_coef_.push_back(g_[j] * static_cast<double>(k[j]));
            }
            if (idx.raise(i, j) != HierarchyIndexSet::kNone) raise_src_.push_back(idx.raise(i, j));
        }
        k_dot_w_[i] = kw;
        lower_start_.push_back(lower_src_.size());
        raise_start_.push_back(raise_src_.size());
    }
    lowered_.resize(d_);
    raised_.resize(d_);
}

void HopsRhs::operator()(const cplx* y, cplx* dy, cplx z_star, const CMatrix& h, double t) const {
    const auto m = static_cast<Eigen::Index>(m_);
    Eigen::Map<const CMatrix> psi(y, d_, m);
    Eigen::Map<const CVector> eta(y + d_ * m, n_);
    Eigen::Map<CVector> deta(dy + d_ * m, n_);

    CMatrix raise_op = l_dag_;
    cplx shifted = z_star;
    if (mode_ == Mode::nonlinear) {
        const auto psi0 = psi.col(0);
        const double norm2 = psi0.squaredNorm();
        if (!(norm2 >= 1e-28)) throw TrajectoryError("trajectory norm collapse", t);
        const cplx l_dag_mean = psi0.dot(l_dag_ * psi0) / norm2;
        shifted += eta.sum();
        raise_op.diagonal().array() -= l_dag_mean;
        for (int j = 0; j < n_; ++j) deta[j] = -std::conj(w_[j]) * eta[j] + std::conj(g_[j]) * l_dag_mean;
    } else {
        deta.setZero();
    }

    // one fused pass per index on raw column-major d×d blocks; d is small, so
    // Eigen's per-column expression overhead would dominate
    const CMatrix a = shifted * l_ - cplx(0.0, 1.0) * h;
    const int d = d_;
    const cplx* pa = a.data();
    const cplx* pl = l_.data();
    const cplx* pr = raise_op.data();
    cplx* low = lowered_.data();
    cplx* up = raised_.data();
    for (std::size_t i = 0; i < m_; ++i) {
        const cplx* pi = y + d * i;
        cplx* di = dy + d * i;
        std::fill(low, low + d, cplx{0.0, 0.0});
        std::fill(up, up + d, cplx{0.0, 0.0});
        for (std::size_t e = lower_start_[i]; e < lower_start_[i + 1]; ++e) {
            const cplx c = lower_coef_[e];
            const cplx* src = y + d * static_cast<std::size_t>(lower_src_[e]);
            for (int r = 0; r < d; ++r) low[r] += c * src[r];
        }
        for (std::size_t e = raise_start_[i]; e < raise_start_[i + 1]; ++e) {
            const cplx* src = y + d * static_cast<std::size_t>(raise_src_[e]);
            for (int r = 0; r < d; ++r) up[r] += src[r];
        }
        const cplx kw = k_dot_w_[i];
        for (int r = 0; r < d; ++r) di[r] = -kw * pi[r];
        for (int c = 0; c < d; ++c) {
            const cplx x = pi[c], lo = low[c], u = up[c];
            const cplx* ca = pa + c * d;
            const cplx* cl = pl + c * d;
            const cplx* cr = pr + c * d;
            for (int r = 0; r < d; ++r) di[r] += ca[r] * x + cl[r] * lo - cr[r] * u;
        }
    }
}

namespace {

TrajectoryState apply_rhs(const TrajectoryState& state, cplx z_star, const SystemModel& model,
                          const ExponentialBCF& e, const HierarchyIndexSet& idx, Mode mode) {
    const HopsRhs rhs(model, e, idx, mode);
    if (static_cast<std::size_t>(state.psi_all.size()) != rhs.psi_size() ||
        state.eta.size() != static_cast<Eigen::Index>(e.size()))
        throw DomainError("trajectory state does not match the hierarchy");
    CVector y(rhs.state_size()), dy(rhs.state_size());
    y << state.psi_all, state.eta;
    rhs(y.data(), dy.data(), z_star, model.h_sys, state.t);
    TrajectoryState out;
    out.psi_all = dy.head(rhs.psi_size());
    out.eta = dy.tail(e.size());
    out.t = state.t;
    return out;
}

}  // namespace

TrajectoryState hops_rhs_linear(const TrajectoryState& state, cplx z_star, const SystemModel& model,
                                const ExponentialBCF& e, const HierarchyIndexSet& idx) {
    return apply_rhs(state, z_star, model, e, idx, Mode::linear);
}

TrajectoryState hops_rhs_nonlinear(const TrajectoryState& state, cplx z_star, const SystemModel& model,
                                   const ExponentialBCF& e, const HierarchyIndexSet& idx) {
    return apply_rhs(state, z_star, model, e, idx, Mode::nonlinear);
}

TrajectoryResult propagate_trajectory(const SystemModel& model, const ExponentialBCF& e, const NoiseFn& noise,
                                      Mode mode, int k_max, const std::vector<double>& out_grid,
                                      const IntegratorOptions& options, const HamiltonianShift& shift) {
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<cplx>;

    if (out_grid.empty()) throw DomainError("propagate_trajectory: empty output grid");
    if (!std::is_sorted(out_grid.begin(), out_grid.end()) ||
        std::adjacent_find(out_grid.begin(), out_grid.end()) != out_grid.end())
        throw DomainError("propagate_trajectory: output grid must be strictly increasing");
    if (!(options.rtol > 0.0) || !(options.atol > 0.0)) throw DomainError("propagate_trajectory: tolerances must be > 0");

    const auto idx = HierarchyIndexSet::build(static_cast<int>(e.size()), k_max);
    const HopsRhs rhs(model, e, idx, mode);
    const int d = model.dim();

    TrajectoryResult result;
    result.mode = mode;
    result.times = out_grid;
    result.psi0_series.reserve(out_grid.size());
    result.norm_series.reserve(out_grid.size());
    auto record = [&](const State& y) {
        CVector psi0 = Eigen::Map<const CVector>(y.data(), d);
        result.norm_series.push_back(psi0.norm());
        result.psi0_series.push_back(std::move(psi0));
    };

    State y(rhs.state_size(), cplx{0.0, 0.0});
    for (int i = 0; i < d; ++i) y[i] = model.psi0[i];

    double last_t = out_grid.front();
    CMatrix h = model.h_sys;
    auto system = [&](const State& x, State& dxdt, double t) {
        if (++result.diagnostics.rhs_evaluations > options.max_rhs_evaluations)
            throw TrajectoryError("propagate_trajectory: right-hand side evaluation limit reached", t);
        last_t = t;
        const cplx z_star = noise ? std::conj(noise(t)) : cplx{0.0, 0.0};
        if (shift) h = model.h_sys + shift(t);
        rhs(x.data(), dxdt.data(), z_star, h, t);
    };

    record(y);
    if (out_grid.size() == 1) return result;

    const double span = out_grid.back() - out_grid.front();
    const double dt0 = options.initial_dt > 0.0 ? options.initial_dt : 1e-3 * (out_grid[1] - out_grid[0]);
    auto stepper = odeint::make_dense_output(options.atol, options.rtol, odeint::runge_kutta_dopri5<State>());
    try {
        stepper.initialize(y, out_grid.front(), dt0);
        std::size_t next = 1;
        State out(y.size());
        while (next < out_grid.size()) {
            stepper.do_step(system);
            const double t_now = stepper.current_time();
            while (next < out_grid.size() && out_grid[next] <= t_now) {
                stepper.calc_state(out_grid[next], out);
                record(out);
                ++next;
            }
            const double floor = 1e-13 * std::max({1.0, std::abs(t_now), span});
            if (next < out_grid.size() && stepper.current_time_step() < floor)
                throw TrajectoryError("step size underflow at t=" + std::to_string(t_now), t_now);
        }
    } catch (const odeint::odeint_error& err) {
        throw TrajectoryError("step size underflow at t=" + std::to_string(last_t) + " (" + err.what() + ")", last_t);
    }
    return result;
}

TrajectoryResult propagate_trajectory(const SystemModel& model, const ExponentialBCF& e,
                                      const StochasticProcess& process, Mode mode, int k_max,
                                      const std::vector<double>& out_grid, const IntegratorOptions& options) {
    if (!out_grid.empty() && (out_grid.front() < 0.0 || out_grid.back() > process.plan().t_max))
        throw DomainError("propagate_trajectory: output grid exceeds the noise horizon");
    return propagate_trajectory(model, e, [&](double t) { return process(t); }, mode, k_max, out_grid, options);
}

std::vector<double> depth_convergence(const SystemModel& model, const ExponentialBCF& e, const NoiseFn& noise,
                                      Mode mode, const std::vector<int>& k_list, int k_ref,
                                      const std::vector<double>& out_grid, const IntegratorOptions& options) {
    const auto reference = propagate_trajectory(model, e, noise, mode, k_ref, out_grid, options);
    std::vector<double> distances;
    for (int k : k_list) {
        if (k == k_ref) {
            distances.push_back(0.0);
            continue;
        }
        const auto run = propagate_trajectory(model, e, noise, mode, k, out_grid, options);
        double worst = 0.0;
        for (std::size_t i = 0; i < out_grid.size(); ++i) {
            const CVector a = run.psi0_series[i] / run.norm_series[i];
            const CVector b = reference.psi0_series[i] / reference.norm_series[i];
            worst = std::max(worst, (a - b).norm());
        }
        distances.push_back(worst);
    }
    return distances;
}

}  // namespace hops
