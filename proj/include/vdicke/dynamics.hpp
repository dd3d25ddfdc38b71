#pragma once

#include "vdicke/model.hpp"
#include "vdicke/su3.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace vdicke {

struct MeanFieldODEState {
    cplx alpha{0.0};
    Mat3 lambda_exp = Mat3::Zero();  // <Lambda_ij> / N
};

/// Real coordinates: Re/Im alpha, three populations, Re/Im of L01, L02, L12.
using Packed = Eigen::Matrix<double, 11, 1>;

Packed pack(const MeanFieldODEState& s);
MeanFieldODEState unpack(const Packed& x);

/// All atoms in |0> with a seed cavity amplitude.
MeanFieldODEState normal_state(cplx alpha = 0.01);

/// Product state of atoms in the single-atom state psi (basis |0>, |1>, |2>).
MeanFieldODEState product_state(const Eigen::Vector3cd& psi, cplx alpha = 0.0);

MeanFieldODEState eom_rhs(const MeanFieldODEState& s, const ModelParams& p);
Packed eom_rhs(const Packed& x, const ModelParams& p);

/// Central-difference Jacobian of the packed right-hand side.
Eigen::Matrix<double, 11, 11> eom_jacobian(const MeanFieldODEState& s, const ModelParams& p, double h = 1e-6);

/// Mean-field energy per atom, conserved when kappa = 0.
double mean_field_energy(const MeanFieldODEState& s, const ModelParams& p);

struct IntegratorControls {
    double rtol = 1e-9;
    double atol = 1e-12;
    double max_step = 0.1;
    double first_step = 1e-3;
    double stride = 0.1;         // output sampling interval
    double record_from = 0.0;    // samples before this time are dropped
    std::size_t max_steps = 100'000'000;
    double drift_limit = std::numeric_limits<double>::infinity();
};

struct Trajectory {
    std::vector<double> t;
    std::vector<MeanFieldODEState> states;
    double max_casimir_drift = 0.0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

/// Adaptive Dormand-Prince 5(4) stepper with dense output. Can be resumed.
class DormandPrince {
public:
    DormandPrince(const ModelParams& p, const MeanFieldODEState& s0, const IntegratorControls& ctl = {});

    /// Advance to t_end, calling sample(t, x) at every multiple of the stride.
    void advance(double t_end, const std::function<void(double, const Packed&)>& sample);

    double time() const { return t_; }
    const Packed& state() const { return x_; }
    double max_casimir_drift() const { return drift_; }
    std::size_t accepted() const { return accepted_; }
    std::size_t rejected() const { return rejected_; }

private:
    void check_drift();

    ModelParams p_;
    IntegratorControls ctl_;
    Packed x_;
    Packed k1_;
    double t_ = 0.0;
    double h_;
    double next_sample_ = 0.0;
    Su3Invariants inv0_;
    double drift_ = 0.0;
    std::size_t accepted_ = 0;
    std::size_t rejected_ = 0;
};

Trajectory integrate(const MeanFieldODEState& s0, const ModelParams& p, double t_end,
                     const IntegratorControls& ctl = {});

enum class AttractorKind { FixedPoint, LimitCycle, Unresolved };

const char* to_string(AttractorKind k);

struct AttractorControls {
    double transient = -1.0;  // negative: max(20 / kappa, 1000)
    double window = 500.0;
    double fp_tol = 1e-6;
    double amplitude_floor = 1e-3;
    double period_tol = 0.01;
    double recurrence_tol = 0.01;  // peak heights one period apart, relative to the amplitude

    double transient_for(double kappa) const;
};

struct AttractorReport {
    AttractorKind kind = AttractorKind::Unresolved;
    MeanFieldODEState fixed_state;
    double period = 0.0;
    double amplitude = 0.0;           // half peak-to-peak of the dominant component
    double relative_amplitude = 0.0;  // max |x - mean| / |mean| over the last window
    double transient_time = 0.0;
};

/// Classifies the last two analysis windows of a uniformly sampled trajectory.
AttractorReport detect_attractor(const Trajectory& traj, const AttractorControls& ctl = {});

struct SettleResult {
    AttractorReport report;
    MeanFieldODEState final_state;
    double t_final = 0.0;
    double max_casimir_drift = 0.0;
};

/// Integrates for transient + 2 windows, then keeps extending (doubling) up to t_max
/// until the detector returns FixedPoint, or LimitCycle when cycles are accepted.
SettleResult settle(const ModelParams& p, const MeanFieldODEState& s0, double t_max,
                    bool accept_cycle, const IntegratorControls& ictl = {},
                    const AttractorControls& actl = {});

struct TargetState {
    double nu;
    Mat3 single_atom_density;  // rho, not transposed
    double n1_frac;
    double theta;              // relative phase convention of build_inverted_form
};

TargetState dark_state(const ModelParams& p);

enum class FidelityMap { SingleAtom, ProductN };

/// Tr(rho_s rho_d) with single-atom density matrices; ProductN raises it to n_atoms.
double fidelity(const MeanFieldODEState& steady, const TargetState& target,
                FidelityMap map = FidelityMap::SingleAtom, double n_atoms = 1.0);

/// As above for a detector result; throws NotConverged unless it is a fixed point.
double fidelity(const AttractorReport& steady, const TargetState& target,
                FidelityMap map = FidelityMap::SingleAtom, double n_atoms = 1.0);

} // namespace vdicke
