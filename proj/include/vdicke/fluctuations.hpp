#pragma once

#include "vdicke/model.hpp"

#include <Eigen/Dense>

namespace vdicke {

/// Coherent displacements per sqrt(N) of the cavity and of the two excited levels.
struct OrderParams {
    cplx alpha{0.0};
    cplx beta1{0.0};
    cplx beta2{0.0};

    double k() const { return 1.0 - std::norm(beta1) - std::norm(beta2); }
};

enum class Sector { NormalSuperradiant, Inverted };

const char* to_string(Sector s);

/// Quadratic fluctuation Hamiltonian h2 = a^+ H a + a^T K a + a^+ K^* a^+.
/// Basis (c, d1, d2) for NormalSuperradiant, (c, d0) for Inverted.
struct QuadraticForm {
    Eigen::MatrixXcd h;
    Eigen::MatrixXcd k;
    Sector sector = Sector::NormalSuperradiant;

    Eigen::Index modes() const { return h.rows(); }
    /// Throws DomainError unless h is Hermitian and k symmetric to tol (relative).
    void validate(double tol = 1e-12) const;
};

inline constexpr double kMinPopulation = 1e-9;

namespace aux {

// Photon-atom couplings of the normal/superradiant sector. The mixing angle is
// passed explicitly since the anomalous entries use pi/2 - phi.
cplx j1(const ModelParams& p, const OrderParams& op, double phi);
cplx j2(const ModelParams& p, const OrderParams& op, double phi);
cplx g1(const ModelParams& p, const OrderParams& op, double phi);
cplx g2(const ModelParams& p, const OrderParams& op, double phi);

double eta1(const ModelParams& p, double n1_frac);
double eta2(const ModelParams& p, double n1_frac);

} // namespace aux

/// Atom-atom blocks from second derivatives of the mean-field energy.
void atom_blocks(const ModelParams& p, const OrderParams& op, Eigen::Matrix2cd& h, Eigen::Matrix2cd& k);

QuadraticForm build_ns_form(const ModelParams& p, const OrderParams& op);
QuadraticForm build_inverted_form(const ModelParams& p, double n1_frac, double theta);

} // namespace vdicke
