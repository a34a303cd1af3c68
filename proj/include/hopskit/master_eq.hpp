// master_eq.hpp - Born-Markov master equations for the spin-boson model

#pragma once

#include <array>
#include <vector>

#include "hopskit/bcf.hpp"
#include "hopskit/expfit.hpp"
#include "hopskit/types.hpp"

namespace hops {

// H_S = εσ_z + Δσ_x coupled through L = σ_z to an Ohmic bath at inverse temperature beta.
struct SpinBosonParams {
    double epsilon{0.0};
    double delta{1.0};
    OhmicSpectralDensity sd;
    double beta{kInfiniteBeta};

    double lambda() const noexcept;
};

CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
// σ_+ = |↑⟩⟨↓|, σ_- = |↓⟩⟨↑| with |↑⟩ = (1, 0).
CMatrix sigma_plus();
CMatrix sigma_minus();

// σ_z split into Bohr-frequency components: L_ω lowers the energy by ω, so
// [H_S, L_ω] = -ω L_ω.
struct JumpDecomposition {
    double theta{0.0};  // tan 2θ = Δ/ε, 2θ ∈ [0, π] for Δ ≥ 0
    double lambda{0.0};
    CMatrix l_0;
    CMatrix l_plus;   // ω = +2λ
    CMatrix l_minus;  // ω = -2λ, adjoint of l_plus
};

// Throws DomainError for ε = Δ = 0.
JumpDecomposition decompose_l(const SpinBosonParams& p);

// Γ(t, ω) = ∫_0^t α(s) e^{iωs} ds for an exponential BCF; t may be infinite.
cplx gamma(const ExponentialBCF& e, double t, double omega);

// Lamb shift frequency S(ω) = Im Γ(∞, ω) of the exact kernel:
// (1/π) P∫ dx J̃(x)/(ω - x) over the whole real line.
double lamb_shift(const OhmicSpectralDensity& sd, double beta, double omega);

// Re Γ(t, 0) of the exact kernel from (1/π)∫_0^∞ J(x) coth(βx/2) sin(xt)/x dx.
double gamma_zero_frequency(const OhmicSpectralDensity& sd, double beta, double t);

enum class MeVariant { constant, extended };

const char* to_string(MeVariant v) noexcept;

struct MeOptions {
    MeVariant variant{MeVariant::constant};
    bool skip_omega0{false};           // drop the ω = 0 channel entirely
    bool freeze_side_channels{false};  // extended: keep ±2λ at J̃(ω) and S(ω)
    double rtol{1e-9};
    double atol{1e-11};
};

struct MeResult {
    std::vector<double> times;
    std::vector<CMatrix> rho;
    // Rate + i·Lamb shift per channel at each output time, ordered
    // (-2λ, 0, +2λ); zero for inactive channels.
    std::vector<std::array<cplx, 3>> channels;
};

// Time-ordered propagation of ρ₀ onto t_grid (strictly increasing, starting
// at 0). Constant: rates J̃(ω) and Lamb shifts S(ω). Extended: Γ(t, ω) of the
// exact kernel, integrated alongside ρ. Throws DomainError if the constant
// variant meets a divergent J̃(0) on a nonzero L_0 channel.
MeResult propagate_me(const SpinBosonParams& p, const CMatrix& rho0, const std::vector<double>& t_grid,
                      const MeOptions& options = {});

// tr(ρ σ_z) per time.
std::vector<double> sigma_z_series(const MeResult& r);

}  // namespace hops
