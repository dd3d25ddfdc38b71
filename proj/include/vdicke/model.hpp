#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <string>

namespace vdicke {

using cplx = std::complex<double>;
using Mat3 = Eigen::Matrix3cd;

inline constexpr double pi = std::numbers::pi;

/// Model constants in units of the reference frequency sqrt(omega * omega0).
struct ModelParams {
    double omega = 2.0;
    double omega0 = 0.5;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double phi = pi / 4;
    double kappa = 0.0;
    double n_atoms = 1.0;
};

/// Throws InvalidParams on violated invariants, returns a copy with phi in [0, pi).
ModelParams canonical(ModelParams p);

double normalize_phi(double phi);

enum class OmegaSign { Literal, Negated };

/// Sign applied to the literal stability-boundary ratio so that the analytic
/// area formula agrees with the rapidity-classified region.
inline constexpr OmegaSign kResolvedOmegaSign = OmegaSign::Negated;

const char* to_string(OmegaSign s);

struct DerivedScalars {
    double b_param;
    double l_param;
    double lambda_r;
    double omega_scaled;   // resolved sign
    double omega_literal;  // ratio as written, before sign resolution
    double lambda_c;
};

double omega_literal(const ModelParams& p);
double omega_scaled(const ModelParams& p, OmegaSign sign = kResolvedOmegaSign);
DerivedScalars derived_scalars(const ModelParams& p);

enum class SymmetryClass { U1_TavisCummings, U1_Balanced, Z2xZ2_Generic };

const char* to_string(SymmetryClass s);
SymmetryClass classify_symmetry(const ModelParams& p, double tol = 1e-10);

struct RamanInputs {
    double rabi_s1 = 0, rabi_s2 = 0, rabi_r1 = 0, rabi_r2 = 0;
    double delta_s1 = 0, delta_s2 = 0, delta_r1 = 0, delta_r2 = 0;
    double g_r = 0, g_s = 0;
    double n_atoms = 1;
    double omega_cavity = 0;      // bare cavity frequency
    double omega_laser_r1 = 0, omega_laser_s1 = 0, omega_laser_r2 = 0, omega_laser_s2 = 0;
    double zeeman_1 = 0, zeeman_2 = 0;
    double kappa = 0;             // same units as the inputs
    double tol = 1e-9;
};

struct RamanMapping {
    ModelParams params;           // scaled by reference_frequency
    double reference_frequency;   // sqrt(omega * omega0) in input units
    bool adiabatic_ok;            // detunings dominate Rabi and single-photon couplings
};

RamanMapping raman_map(const RamanInputs& r);

/// Effective fields coupling |0> to |1>, |2> for a coherent cavity amplitude.
struct CouplingFields {
    cplx g1;
    cplx g2;
};

CouplingFields coupling_fields(const ModelParams& p, cplx alpha);

/// Single-atom mean-field Hamiltonian in the basis (|0>, |1>, |2>).
Mat3 mean_field_hamiltonian(const ModelParams& p, cplx alpha);

} // namespace vdicke
