#pragma once

#include "vdicke/dynamics.hpp"
#include "vdicke/fluctuations.hpp"
#include "vdicke/model.hpp"

#include <optional>
#include <vector>

namespace vdicke {

enum class AtomicBranch { Lower, Upper };

/// <Lambda_ij>/N for the lower or upper non-dark eigenstate of the single-atom
/// mean-field Hamiltonian with effective fields (m1, m2).
Mat3 atomic_expectations(cplx m1, cplx m2, double omega0, AtomicBranch branch = AtomicBranch::Lower);

struct SteadyAtomicState {
    Mat3 lambda_exp = Mat3::Zero();
    cplx cavity_alpha{0.0};
    cplx m1{0.0};
    cplx m2{0.0};
    int multiplicity = 1;     // 2 when the Z2 partner -alpha was also found
    double residual = 0.0;    // norm of the mean-field right-hand side

    bool is_normal() const { return std::abs(cavity_alpha) < 1e-10; }
    OrderParams order_params() const;
};

/// Cavity steady-state residual with atoms slaved to the given eigenstate branch.
cplx cavity_residual(const ModelParams& p, cplx alpha, AtomicBranch branch = AtomicBranch::Lower);

SteadyAtomicState steady_state_at(const ModelParams& p, cplx alpha, AtomicBranch branch = AtomicBranch::Lower);

struct SteadySolveControls {
    int max_iter = 80;
    double tol = 1e-12;
    double dedup_tol = 1e-8;
    AtomicBranch branch = AtomicBranch::Lower;
};

/// Deterministic seed lattice plus the closed-system superradiant amplitudes.
std::vector<cplx> default_seeds(const ModelParams& p, int n = 11, double radius = 1.5);

/// Fixed points of the driven-dissipative mean-field equations. The normal state
/// comes first; Z2 partners are merged into one entry with multiplicity 2.
std::vector<SteadyAtomicState> solve_sp_steady(const ModelParams& p, const std::vector<cplx>& seeds,
                                               const SteadySolveControls& ctl = {});
std::vector<SteadyAtomicState> solve_sp_steady(const ModelParams& p);

/// chi = 1/2 [[iH + M, 2iK*], [-2iK, -iH* + M]] with M = diag(kappa, 0, ...).
Eigen::MatrixXcd shape_matrix(const QuadraticForm& q, double kappa);

struct RapiditySet {
    std::vector<cplx> zetas;  // sorted by (real, imag)
    double min_real = 0.0;

    bool stable(double tol = 1e-8) const { return min_real >= -tol; }
    bool marginal(double tol = 1e-8) const { return std::abs(min_real) < tol; }
};

RapiditySet rapidities(const Eigen::MatrixXcd& chi);

RapiditySet np_rapidities(const ModelParams& p);
RapiditySet steady_rapidities(const ModelParams& p, const SteadyAtomicState& s);
RapiditySet inverted_rapidities(const ModelParams& p, double n1_frac, double theta);

/// When classify_open integrates the equations of motion to look for limit cycles.
enum class OsProbe {
    Never,
    NoStableFixedPoint,  // NP and every SP unstable
    NpUnstable           // also catches limit cycles coexisting with a stable SP
};

struct OpenClassifyControls {
    double stability_tol = 1e-8;
    OsProbe os_probe = OsProbe::NoStableFixedPoint;
    double os_t_max = 4000.0;
    IntegratorControls integrator{};
    AttractorControls attractor{};
};

struct SteadyVerdict {
    SteadyAtomicState state;
    RapiditySet rapidities;
    bool stable;
};

struct OpenPhaseRecord {
    bool np_stable = false;
    bool np_marginal = false;
    double np_min_real = 0.0;
    std::vector<SteadyVerdict> sp;  // nonzero fixed points
    bool sp_stable = false;
    bool inverted_stable = false;
    bool os = false;
    std::optional<AttractorReport> attractor;  // set when the dynamics were consulted

    /// "NP", "SP", "NP+SP", "SP+OS", "OS" or "none"; inverted stability is reported separately.
    std::string label() const;
    /// Largest |<Lambda_01>|/N over stable superradiant fixed points, 0 if none.
    double stable_sp_order() const;
};

OpenPhaseRecord classify_open(const ModelParams& p, const OpenClassifyControls& ctl = {});

struct InvertedRegion {
    std::vector<std::pair<double, double>> boundary_samples;  // (theta, N1/N)
    double area = 0.0;             // per N, within [0, 2 pi]
    double omega_used = 0.0;       // resolved Omega
    double area_literal = 0.0;     // analytic area with the literal sign
    double area_negated = 0.0;     // analytic area with the negated sign
    OmegaSign matched = kResolvedOmegaSign;
    bool dark_point_stable = false;
};

/// Analytic stable-region area per N for a given Omega.
double inverted_area_formula(const ModelParams& p, double omega_scaled);

/// Classifies the (theta, N1/N) plane by inverted-sector rapidities: theta at cell
/// centres, N1/N on n_n1 nodes including both ends, with each stability change
/// along N1/N located by bisection.
InvertedRegion inverted_region(const ModelParams& p, int n_theta = 256, int n_n1 = 256, double tol = 1e-9);

} // namespace vdicke
