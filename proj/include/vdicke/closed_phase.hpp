#pragma once

#include "vdicke/fluctuations.hpp"
#include "vdicke/model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace vdicke {

/// Mean-field energy per atom at displacement (alpha, beta1, beta2).
double mean_field_energy(const ModelParams& p, const OrderParams& op);

/// Energy per atom after minimizing over the atomic displacements at fixed alpha.
/// Zero at alpha = 0. Throws DomainError if the radicand is negative.
double me_landscape(cplx alpha, const ModelParams& p);

/// Equilibrium residuals (-dE/dbeta1*, -dE/dbeta1, -dE/dbeta2*, -dE/dbeta2).
std::array<cplx, 4> equilibrium_residuals(const ModelParams& p, const OrderParams& op);

/// (2|B| + L)^2 - omega^2 omega0^2: negative inside the normal phase.
double np_boundary_residual(const ModelParams& p);

/// Superradiant |alpha|; throws NotSuperradiant below threshold.
double sp_amplitude(const ModelParams& p);

/// Closed-form superradiant amplitudes, the Z2 pair +-alpha. The phase is real for
/// B > 0, imaginary for B < 0 and taken real on the degenerate line B = 0.
std::vector<cplx> sp_alphas(const ModelParams& p);

struct OrderSolveControls {
    int max_iter = 60;
    int restarts = 16;
    double tol = 1e-12;
    std::uint64_t seed = 12345;
};

/// Atomic displacements stationary at fixed alpha. Seeds from the lowest eigenvector
/// of the single-atom mean-field Hamiltonian, then damped Newton with restarts.
OrderParams solve_order_params(cplx alpha, const ModelParams& p, const OrderSolveControls& ctl = {});

struct SpectrumResult {
    std::vector<cplx> frequencies;         // sorted by (real, imag)
    std::vector<double> symplectic_norms;  // +-1, or 0 for a null-norm (complex) mode
    std::vector<double> norm_weights;      // v^+ Iz v / v^+ v
    bool is_real = true;
    double max_imag = 0.0;
};

/// Eigenfrequencies of the Hopfield-Bogoliubov matrix [[H, 2K*], [-2K, -H^T]].
SpectrumResult hb_spectrum(const QuadraticForm& q, double tol = 1e-6);

enum class ClosedPhase : std::uint8_t { NP = 1, SP1 = 2, SP2 = 4, eNP = 8 };

const char* to_string(ClosedPhase ph);

struct ClosedCandidate {
    ClosedPhase phase;
    OrderParams order;
    double energy;
    SpectrumResult spectrum;
    bool stable;
};

struct ClosedPhasePoint {
    std::uint8_t stable_mask = 0;
    std::vector<ClosedCandidate> candidates;
    bool u1_line = false;  // B = 0 above threshold: SP1 and SP2 degenerate

    bool has(ClosedPhase ph) const { return stable_mask & static_cast<std::uint8_t>(ph); }
    std::string label() const;
    const ClosedCandidate* find(ClosedPhase ph) const;
};

ClosedPhasePoint classify_closed(const ModelParams& p, double spectral_tol = 1e-6,
                                 const OrderSolveControls& solver = {});

} // namespace vdicke
