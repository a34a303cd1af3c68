// hops.hpp - hierarchy of pure states: index set, right-hand side, trajectories

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hopskit/expfit.hpp"
#include "hopskit/stocproc.hpp"
#include "hopskit/types.hpp"

namespace hops {

struct SystemModel {
    CMatrix h_sys;       // d×d Hermitian
    CMatrix coupling_l;  // d×d, any
    CVector psi0;        // unit norm

    // Throws DomainError on shape mismatch, non-Hermitian H (1e-12) or |psi0| != 1.
    static SystemModel make(CMatrix h_sys, CMatrix coupling_l, CVector psi0);
    int dim() const noexcept { return static_cast<int>(h_sys.rows()); }
};

// C(N + k_max, N); throws DomainError if it does not fit in 64 bits.
std::uint64_t hierarchy_size(int n_terms, int k_max);

// All k ∈ ℕ^N with Σk_j ≤ k_max in graded lexicographic order: level by level,
// and within a level in decreasing lexicographic order, e.g. for N=2, k_max=2:
// (0,0) (1,0) (0,1) (2,0) (1,1) (0,2).
class HierarchyIndexSet {
public:
    static constexpr std::int32_t kNone = -1;
    static constexpr std::uint64_t kDefaultBudget = 20'000'000;

    static HierarchyIndexSet build(int n_terms, int k_max, std::uint64_t max_count = kDefaultBudget);

    std::size_t size() const noexcept { return level_.size(); }
    int n_terms() const noexcept { return n_terms_; }
    int k_max() const noexcept { return k_max_; }

    std::span<const int> index(std::size_t i) const;
    int level(std::size_t i) const noexcept { return level_[i]; }
    // Position of k ± e_j, or kNone.
    std::int32_t raise(std::size_t i, int j) const noexcept { return raise_[i * n_terms_ + j]; }
    std::int32_t lower(std::size_t i, int j) const noexcept { return lower_[i * n_terms_ + j]; }
    // Position of a multi-index, or kNone if outside the truncated set.
    std::int32_t position(std::span<const int> k) const;

private:
    int n_terms_{0};
    int k_max_{0};
    std::vector<int> flat_;  // size() × N
    std::vector<int> level_;
    std::vector<std::int32_t> raise_;
    std::vector<std::int32_t> lower_;
};

enum class Mode { linear, nonlinear };

const char* to_string(Mode m) noexcept;

// Stochastic trajectory failure (norm collapse, step-size underflow).
class TrajectoryError : public std::runtime_error {
public:
    TrajectoryError(const std::string& what, double t) : std::runtime_error(what), time(t) {}
    double time;
};

// Layout [ψ^k blocks of length d in index order, η_1..η_N].
struct TrajectoryState {
    CVector psi_all;
    CVector eta;
    double t{0.0};
};

// Evaluates the hierarchy right-hand side; holds scratch space, so one
// instance per thread.
class HopsRhs {
public:
    HopsRhs(const SystemModel& model, const ExponentialBCF& bcf, const HierarchyIndexSet& idx, Mode mode);

    std::size_t state_size() const noexcept { return static_cast<std::size_t>(d_) * m_ + n_; }
    std::size_t psi_size() const noexcept { return static_cast<std::size_t>(d_) * m_; }

    // dy for the packed state y. `h` is the instantaneous system Hamiltonian,
    // z_star the conjugated noise z*_t. Throws TrajectoryError on norm collapse
    // (nonlinear mode, ⟨ψ^0|ψ^0⟩ < 1e-28).
    void operator()(const cplx* y, cplx* dy, cplx z_star, const CMatrix& h, double t) const;

    const CMatrix& coupling() const noexcept { return l_; }
    Mode mode() const noexcept { return mode_; }

private:
    CMatrix l_, l_dag_;
    std::vector<cplx> g_, w_;
    Mode mode_;
    int d_, n_;
    std::size_t m_;
    std::vector<cplx> k_dot_w_;             // Σ_j k_j W_j per index
    std::vector<std::size_t> lower_start_;  // CSR rows into lower_src_/lower_coef_
    std::vector<std::int32_t> lower_src_;
    std::vector<cplx> lower_coef_;          // G_j k_j
    std::vector<std::size_t> raise_start_;
    std::vector<std::int32_t> raise_src_;
    mutable CVector lowered_, raised_;  // per-index scratch
};

// Derivative of the linear hierarchy; eta part is zero.
TrajectoryState hops_rhs_linear(const TrajectoryState& state, cplx z_star, const SystemModel& model,
                                const ExponentialBCF& e, const HierarchyIndexSet& idx);

// Derivative of the nonlinear hierarchy with shifted noise z*_t + Σ η_j and
// raise coupling (L† − ⟨L†⟩), plus dη_j/dt = −W_j* η_j + G_j* ⟨L†⟩.
TrajectoryState hops_rhs_nonlinear(const TrajectoryState& state, cplx z_star, const SystemModel& model,
                                   const ExponentialBCF& e, const HierarchyIndexSet& idx);

struct IntegratorOptions {
    double rtol{1e-6};
    double atol{1e-8};
    double initial_dt{0.0};  // zero: 1e-3 of the first output interval
    std::uint64_t max_rhs_evaluations{200'000'000};
};

struct IntegratorDiagnostics {
    std::uint64_t rhs_evaluations{0};
};

struct TrajectoryResult {
    std::vector<double> times;
    std::vector<CVector> psi0_series;  // ψ^0(t), not normalized
    std::vector<double> norm_series;   // |ψ^0(t)|
    Mode mode{Mode::linear};
    IntegratorDiagnostics diagnostics;
};

// z(t) of the driving process; the hierarchy uses its conjugate.
using NoiseFn = std::function<cplx(double)>;
// Additive Hermitian term on H_S at time t (thermal shift); may be empty.
using HamiltonianShift = std::function<CMatrix(double)>;

// Adaptive Dormand-Prince 5(4) with dense output onto out_grid, starting from
// ψ^0 = psi0 and zero auxiliary states. An empty noise means z ≡ 0.
TrajectoryResult propagate_trajectory(const SystemModel& model, const ExponentialBCF& e, const NoiseFn& noise,
                                      Mode mode, int k_max, const std::vector<double>& out_grid,
                                      const IntegratorOptions& options = {}, const HamiltonianShift& shift = {});

// Same, checking out_grid against the process horizon t_max.
TrajectoryResult propagate_trajectory(const SystemModel& model, const ExponentialBCF& e,
                                      const StochasticProcess& process, Mode mode, int k_max,
                                      const std::vector<double>& out_grid, const IntegratorOptions& options = {});

// max_t |ψ̃_k(t) − ψ̃_ref(t)| with ψ̃ = ψ^0/|ψ^0|, per k in k_list, for one fixed noise.
std::vector<double> depth_convergence(const SystemModel& model, const ExponentialBCF& e, const NoiseFn& noise,
                                      Mode mode, const std::vector<int>& k_list, int k_ref,
                                      const std::vector<double>& out_grid, const IntegratorOptions& options = {});

}  // namespace hops
