#include "vdicke/model.hpp"
#include "vdicke/errors.hpp"

#include <algorithm>
#include <cmath>

namespace vdicke {

double normalize_phi(double phi)
{
    if (!std::isfinite(phi))
        throw InvalidParams("phi must be finite");
    double r = std::fmod(phi, pi);
    if (r < 0)
        r += pi;
    if (r >= pi)
        r = 0.0;
    return r;
}

ModelParams canonical(ModelParams p)
{
    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(p.omega) || p.omega <= 0)
        throw InvalidParams("omega must be > 0");
    if (!finite(p.omega0) || p.omega0 <= 0)
        throw InvalidParams("omega0 must be > 0");
    if (!finite(p.kappa) || p.kappa < 0)
        throw InvalidParams("kappa must be >= 0");
    if (!finite(p.lambda1) || p.lambda1 < 0)
        throw InvalidParams("lambda1 must be >= 0");
    if (!finite(p.lambda2) || p.lambda2 < 0)
        throw InvalidParams("lambda2 must be >= 0");
    if (!finite(p.n_atoms) || p.n_atoms < 1)
        throw InvalidParams("n_atoms must be >= 1");
    p.phi = normalize_phi(p.phi);
    return p;
}

const char* to_string(OmegaSign s)
{
    return s == OmegaSign::Literal ? "literal" : "negated";
}

double omega_literal(const ModelParams& p)
{
    const double s = p.kappa * p.kappa + p.omega * p.omega + p.omega0 * p.omega0;
    const double c2 = std::cos(2 * p.phi);
    const double num = s * c2 - 2 * p.omega0 * p.omega;
    const double den = s - 2 * p.omega0 * p.omega * c2;
    if (std::abs(den) < 1e-300)
        return -1.0;
    return std::clamp(num / den, -1.0, 1.0);
}

double omega_scaled(const ModelParams& p, OmegaSign sign)
{
    const double w = omega_literal(p);
    return sign == OmegaSign::Literal ? w : -w;
}

DerivedScalars derived_scalars(const ModelParams& in)
{
    const ModelParams p = canonical(in);
    const double l1s = p.lambda1 * p.lambda1;
    const double l2s = p.lambda2 * p.lambda2;
    DerivedScalars d{};
    d.b_param = std::cos(p.phi) * std::sin(p.phi) * (l1s - l2s);
    d.l_param = l1s + l2s;
    d.lambda_r = std::sqrt(l1s + l2s);
    d.omega_literal = omega_literal(p);
    d.omega_scaled = omega_scaled(p);
    d.lambda_c = std::sqrt(p.omega * p.omega0 / 2);
    return d;
}

const char* to_string(SymmetryClass s)
{
    switch (s) {
    case SymmetryClass::U1_TavisCummings: return "U1_TavisCummings";
    case SymmetryClass::U1_Balanced: return "U1_Balanced";
    case SymmetryClass::Z2xZ2_Generic: return "Z2xZ2_Generic";
    }
    return "?";
}

SymmetryClass classify_symmetry(const ModelParams& in, double tol)
{
    const ModelParams p = canonical(in);
    const double dphi = std::min({p.phi, std::abs(p.phi - pi / 2), pi - p.phi});
    if (dphi <= tol)
        return SymmetryClass::U1_TavisCummings;
    const double scale = std::max({1.0, p.lambda1, p.lambda2});
    if (std::abs(p.lambda1 - p.lambda2) <= tol * scale)
        return SymmetryClass::U1_Balanced;
    return SymmetryClass::Z2xZ2_Generic;
}

RamanMapping raman_map(const RamanInputs& r)
{
    for (double d : {r.delta_s1, r.delta_s2, r.delta_r1, r.delta_r2})
        if (d == 0.0)
            throw ZeroDetuning("all detunings must be nonzero");

    auto close = [&](double a, double b) {
        return std::abs(a - b) <= r.tol * std::max({1.0, std::abs(a), std::abs(b)});
    };
    const double x1 = r.g_r / r.delta_r1;
    const double x2 = r.g_r / r.delta_r2;
    const double xs = r.g_s / r.delta_s1 + r.g_s / r.delta_s2;
    if (!close(x1, x2) || !close(x1, xs))
        throw InconsistentRaman("dispersive shifts g_r/delta_r1, g_r/delta_r2, g_s/delta_s1 + g_s/delta_s2 differ");

    const double omega_a = r.omega_cavity - (r.omega_laser_r1 + r.omega_laser_s1) / 2;
    // The dispersive shift multiplies the total population, which is N.
    const double omega = omega_a + r.n_atoms * x1;
    const double w00 = r.rabi_r1 * r.rabi_r1 / (4 * r.delta_r1) + r.rabi_r2 * r.rabi_r2 / (4 * r.delta_r2);
    const double w10 = r.zeeman_1 + r.rabi_s1 * r.rabi_s1 / (4 * r.delta_s1)
        - (r.omega_laser_r1 - r.omega_laser_s1) / 2;
    const double w20 = r.zeeman_2 + r.rabi_s2 * r.rabi_s2 / (4 * r.delta_s2)
        - (r.omega_laser_r2 - r.omega_laser_s2) / 2;
    if (!close(w10, w20))
        throw InconsistentRaman("levels |1> and |2> are not degenerate");
    const double omega0 = w10 - w00;

    const double sq = std::sqrt(r.n_atoms);
    const double l1s = sq * r.rabi_s1 * r.g_s / (2 * r.delta_s1);
    const double l1r = sq * r.rabi_r1 * r.g_r / (2 * r.delta_r1);
    const double l2s = sq * r.rabi_s2 * r.g_s / (2 * r.delta_s2);
    const double l2r = sq * r.rabi_r2 * r.g_r / (2 * r.delta_r2);
    const double lam1 = std::hypot(l1s, l1r);
    const double lam2 = std::hypot(l2s, l2r);

    double phi = 0.0;
    bool have_phi = false;
    for (auto [ls, lr, lam] : {std::tuple{l1s, l1r, lam1}, std::tuple{l2s, l2r, lam2}}) {
        if (lam == 0.0)
            continue;
        const double ph = normalize_phi(std::atan2(ls, lr));
        if (have_phi) {
            double diff = std::abs(ph - phi);
            diff = std::min(diff, pi - diff);
            if (diff > std::sqrt(r.tol))
                throw InconsistentRaman("channels 1 and 2 imply different mixing angles");
        } else {
            phi = ph;
            have_phi = true;
        }
    }

    if (omega <= 0 || omega0 <= 0)
        throw InvalidParams("mapped omega and omega0 must be positive");
    const double ref = std::sqrt(omega * omega0);

    const double drive = std::max({std::abs(r.rabi_s1), std::abs(r.rabi_s2), std::abs(r.rabi_r1),
                                   std::abs(r.rabi_r2), std::abs(r.g_r), std::abs(r.g_s)});
    const double detune = std::min({std::abs(r.delta_s1), std::abs(r.delta_s2), std::abs(r.delta_r1),
                                    std::abs(r.delta_r2)});

    RamanMapping m;
    m.params = canonical({omega / ref, omega0 / ref, lam1 / ref, lam2 / ref, phi, r.kappa / ref, r.n_atoms});
    m.reference_frequency = ref;
    m.adiabatic_ok = detune > 10 * drive;
    return m;
}

CouplingFields coupling_fields(const ModelParams& p, cplx alpha)
{
    const double s = std::sin(p.phi), c = std::cos(p.phi);
    const cplx ac = std::conj(alpha);
    return {p.lambda1 * (s * alpha + c * ac), cplx(0, 1) * p.lambda2 * (s * alpha - c * ac)};
}

Mat3 mean_field_hamiltonian(const ModelParams& p, cplx alpha)
{
    const auto [g1, g2] = coupling_fields(p, alpha);
    Mat3 h = Mat3::Zero();
    h(1, 1) = h(2, 2) = p.omega0;
    h(1, 0) = g1;
    h(0, 1) = std::conj(g1);
    h(2, 0) = g2;
    h(0, 2) = std::conj(g2);
    return h;
}

} // namespace vdicke
