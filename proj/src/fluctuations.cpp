#include "vdicke/fluctuations.hpp"
#include "vdicke/errors.hpp"

#include <cmath>

namespace vdicke {

namespace {

constexpr cplx I{0.0, 1.0};

} // namespace

const char* to_string(Sector s)
{
    return s == Sector::Inverted ? "inverted" : "normal-superradiant";
}

void QuadraticForm::validate(double tol) const
{
    const Eigen::Index n = modes();
    if (h.cols() != n || k.rows() != n || k.cols() != n)
        throw DomainError("H and K must be square and of equal size");
    if (n != (sector == Sector::Inverted ? 2 : 3))
        throw DomainError("matrix size does not match sector");
    const double scale = std::max({1.0, h.cwiseAbs().maxCoeff(), k.cwiseAbs().maxCoeff()});
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
        throw DomainError("H is not Hermitian");
    if ((k - k.transpose()).cwiseAbs().maxCoeff() > tol * scale)
        throw DomainError("K is not symmetric");
    if (!h.allFinite() || !k.allFinite())
        throw DomainError("non-finite entries");
}

namespace aux {

cplx j1(const ModelParams& p, const OrderParams& op, double phi)
{
    const double s = std::sin(phi), c = std::cos(phi), k = op.k();
    const cplx b = std::conj(op.beta1);
    return (-b * b * c - s * std::norm(op.beta1) + 2 * s * k) * p.lambda1 / (2 * std::sqrt(k));
}

cplx j2(const ModelParams& p, const OrderParams& op, double phi)
{
    const double s = std::sin(phi), c = std::cos(phi), k = op.k();
    const cplx b = std::conj(op.beta2);
    return (-b * b * c - s * std::norm(op.beta2) + 2 * s * k) * p.lambda2 / (2 * std::sqrt(k));
}

cplx g1(const ModelParams& p, const OrderParams& op, double phi)
{
    const double s = std::sin(phi), c = std::cos(phi);
    const cplx b1c = std::conj(op.beta1), b2c = std::conj(op.beta2);
    return (I * c * b2c * b1c + I * s * b2c * op.beta1) * p.lambda1 / (2 * std::sqrt(op.k()));
}

cplx g2(const ModelParams& p, const OrderParams& op, double phi)
{
    const double s = std::sin(phi), c = std::cos(phi);
    const cplx b1c = std::conj(op.beta1), b2c = std::conj(op.beta2);
    return (I * c * b2c * b1c + I * s * b1c * op.beta2) * p.lambda2 / (2 * std::sqrt(op.k()));
}

double eta1(const ModelParams& p, double n1_frac)
{
    return std::sqrt(n1_frac) * p.lambda1;
}

double eta2(const ModelParams& p, double n1_frac)
{
    return p.lambda2 * std::sqrt(1.0 - n1_frac);
}

} // namespace aux

void atom_blocks(const ModelParams& p, const OrderParams& op, Eigen::Matrix2cd& h, Eigen::Matrix2cd& k)
{
    const double u = std::sqrt(op.k());
    const double u3 = u * u * u;
    const auto f = coupling_fields(p, op.alpha);
    const cplx g[2] = {f.g1, f.g2};
    const cplx gs[2] = {std::conj(f.g1), std::conj(f.g2)};
    const cplx b[2] = {op.beta1, op.beta2};
    const cplx bc[2] = {std::conj(op.beta1), std::conj(op.beta2)};
    const cplx c = bc[0] * g[0] + b[0] * gs[0] + bc[1] * g[1] + b[1] * gs[1];

    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double d = i == j ? 1.0 : 0.0;
            h(i, j) = p.omega0 * d + (-d / (2 * u) - b[i] * bc[j] / (4 * u3)) * c
                - b[i] / (2 * u) * gs[j] - bc[j] / (2 * u) * g[i];
            k(i, j) = 0.5 * (-bc[i] * bc[j] * c / (4 * u3) - bc[i] * gs[j] / (2 * u) - bc[j] * gs[i] / (2 * u));
        }
}

QuadraticForm build_ns_form(const ModelParams& in, const OrderParams& op)
{
    if (!(op.k() > kMinPopulation))
        throw UnphysicalState("ground-level population k must exceed 1e-9");
    const ModelParams p = canonical(in);
    const double phi = p.phi, phic = pi / 2 - p.phi;

    QuadraticForm q;
    q.sector = Sector::NormalSuperradiant;
    q.h = Eigen::MatrixXcd::Zero(3, 3);
    q.k = Eigen::MatrixXcd::Zero(3, 3);

    q.h(0, 0) = p.omega;
    q.h(0, 1) = aux::g2(p, op, phi) + aux::j1(p, op, phi);
    q.h(0, 2) = I * aux::g1(p, op, phi) - I * aux::j2(p, op, phi);
    q.h(1, 0) = std::conj(q.h(0, 1));
    q.h(2, 0) = std::conj(q.h(0, 2));
    q.k(0, 1) = q.k(1, 0) = 0.5 * (aux::j1(p, op, phic) - aux::g2(p, op, phic));
    q.k(0, 2) = q.k(2, 0) = 0.5 * I * (aux::g1(p, op, phic) + aux::j2(p, op, phic));

    Eigen::Matrix2cd ha, ka;
    atom_blocks(p, op, ha, ka);
    q.h.block<2, 2>(1, 1) = ha;
    q.k.block<2, 2>(1, 1) = ka;
    q.validate();
    return q;
}

QuadraticForm build_inverted_form(const ModelParams& in, double n1_frac, double theta)
{
    if (!(n1_frac >= 0.0 && n1_frac <= 1.0))
        throw DomainError("n1_frac must lie in [0, 1]");
    const ModelParams p = canonical(in);
    const double s = std::sin(p.phi), c = std::cos(p.phi);
    const double e1 = aux::eta1(p, n1_frac), e2 = aux::eta2(p, n1_frac);
    const cplx ph = std::exp(-I * theta);

    QuadraticForm q;
    q.sector = Sector::Inverted;
    q.h = Eigen::MatrixXcd::Zero(2, 2);
    q.k = Eigen::MatrixXcd::Zero(2, 2);
    q.h(0, 0) = p.omega;
    q.h(1, 1) = -p.omega0;
    q.h(0, 1) = c * (e1 - I * e2 * ph);
    q.h(1, 0) = std::conj(q.h(0, 1));
    q.k(0, 1) = q.k(1, 0) = 0.5 * s * (e1 + I * e2 * ph);
    return q;
}

} // namespace vdicke
