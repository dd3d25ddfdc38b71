#include "vdicke/closed_phase.hpp"
#include "vdicke/errors.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

namespace vdicke {

namespace {

using Vec4 = Eigen::Vector4d;

cplx atom_coupling_sum(const CouplingFields& f, const OrderParams& op)
{
    return std::conj(op.beta1) * f.g1 + op.beta1 * std::conj(f.g1)
        + std::conj(op.beta2) * f.g2 + op.beta2 * std::conj(f.g2);
}

// dE/dbeta_j* for j = 1, 2.
std::array<cplx, 2> atom_gradient(const ModelParams& p, const OrderParams& op)
{
    const double u = std::sqrt(op.k());
    const auto f = coupling_fields(p, op.alpha);
    const cplx c = atom_coupling_sum(f, op);
    return {p.omega0 * op.beta1 + u * f.g1 - op.beta1 * c / (2 * u),
            p.omega0 * op.beta2 + u * f.g2 - op.beta2 * c / (2 * u)};
}

OrderParams from_vec(cplx alpha, const Vec4& x)
{
    return {alpha, cplx(x[0], x[1]), cplx(x[2], x[3])};
}

Vec4 gradient_vec(const ModelParams& p, const OrderParams& op)
{
    const auto g = atom_gradient(p, op);
    return {g[0].real(), g[0].imag(), g[1].real(), g[1].imag()};
}

double newton_polish(const ModelParams& p, cplx alpha, Vec4& x, const OrderSolveControls& ctl)
{
    auto resid = [&](const Vec4& y) -> Vec4 {
        const OrderParams op = from_vec(alpha, y);
        if (!(op.k() > kMinPopulation))
            return Vec4::Constant(std::numeric_limits<double>::infinity());
        return gradient_vec(p, op);
    };

    Vec4 r = resid(x);
    for (int it = 0; it < ctl.max_iter && r.norm() > ctl.tol; ++it) {
        Eigen::Matrix4d jac;
        constexpr double h = 1e-7;
        for (int j = 0; j < 4; ++j) {
            Vec4 xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            jac.col(j) = (resid(xp) - resid(xm)) / (2 * h);
        }
        if (!jac.allFinite())
            break;
        const Vec4 step = jac.fullPivLu().solve(-r);
        double t = 1.0;
        Vec4 xn = x + step;
        Vec4 rn = resid(xn);
        while (!(rn.norm() < r.norm()) && t > 1e-4) {
            t *= 0.5;
            xn = x + t * step;
            rn = resid(xn);
        }
        if (!(rn.norm() < r.norm()))
            break;
        x = xn;
        r = rn;
    }
    return r.norm();
}

} // namespace

double mean_field_energy(const ModelParams& p, const OrderParams& op)
{
    const double k = op.k();
    if (k < 0)
        throw UnphysicalState("negative ground-level population");
    const auto f = coupling_fields(p, op.alpha);
    return p.omega * std::norm(op.alpha) + p.omega0 * (std::norm(op.beta1) + std::norm(op.beta2))
        + std::sqrt(k) * atom_coupling_sum(f, op).real();
}

double me_landscape(cplx alpha, const ModelParams& in)
{
    const ModelParams p = canonical(in);
    const DerivedScalars d = derived_scalars(p);
    const double q = 4 * d.b_param * 2 * (alpha * alpha).real() + 4 * d.l_param * std::norm(alpha);
    const double rad = q + p.omega0 * p.omega0;
    if (!(rad > 0))
        throw DomainError("q + omega0^2 must be positive");
    return p.omega * std::norm(alpha) + 0.5 * p.omega0 - 0.5 * std::sqrt(rad);
}

std::array<cplx, 4> equilibrium_residuals(const ModelParams& p, const OrderParams& op)
{
    if (!(op.k() > 0))
        throw UnphysicalState("ground-level population k must be positive");
    const auto g = atom_gradient(p, op);
    return {-g[0], -std::conj(g[0]), -g[1], -std::conj(g[1])};
}

double np_boundary_residual(const ModelParams& in)
{
    const ModelParams p = canonical(in);
    const DerivedScalars d = derived_scalars(p);
    const double s = 2 * std::abs(d.b_param) + d.l_param;
    return s * s - p.omega * p.omega * p.omega0 * p.omega0;
}

double sp_amplitude(const ModelParams& in)
{
    const ModelParams p = canonical(in);
    const double res = np_boundary_residual(p);
    if (res < 0)
        throw NotSuperradiant("coupling below the normal-phase boundary");
    const DerivedScalars d = derived_scalars(p);
    const double s = 2 * std::abs(d.b_param) + d.l_param;
    if (s == 0)
        return 0.0;
    return std::sqrt(res / (4 * s * p.omega * p.omega));
}

std::vector<cplx> sp_alphas(const ModelParams& in)
{
    const ModelParams p = canonical(in);
    const double a = sp_amplitude(p);
    const DerivedScalars d = derived_scalars(p);
    const cplx z = d.b_param < -1e-12 * d.l_param ? cplx(0, a) : cplx(a, 0);
    return {z, -z};
}

OrderParams solve_order_params(cplx alpha, const ModelParams& in, const OrderSolveControls& ctl)
{
    const ModelParams p = canonical(in);
    if (alpha == cplx(0))
        return {};

    Eigen::SelfAdjointEigenSolver<Mat3> es(mean_field_hamiltonian(p, alpha));
    Eigen::Vector3cd psi = es.eigenvectors().col(0);
    if (std::abs(psi[0]) < 1e-12)
        throw UnphysicalState("lowest mean-field state has no ground-level weight");
    psi *= std::polar(1.0, -std::arg(psi[0]));

    Vec4 best(psi[1].real(), psi[1].imag(), psi[2].real(), psi[2].imag());
    double best_res = newton_polish(p, alpha, best, ctl);

    std::mt19937_64 rng(ctl.seed);
    std::uniform_real_distribution<double> uni(-0.5, 0.5);
    for (int r = 0; r < ctl.restarts && best_res > 1e-10; ++r) {
        Vec4 x(uni(rng), uni(rng), uni(rng), uni(rng));
        if (x.norm() > 0.5)
            x *= 0.5 / x.norm();
        const double res = newton_polish(p, alpha, x, ctl);
        if (res < best_res) {
            best_res = res;
            best = x;
        }
    }
    if (!(best_res <= 1e-10))
        throw NoConvergence("equilibrium residual " + std::to_string(best_res));
    const OrderParams op = from_vec(alpha, best);
    if (!(op.k() > kMinPopulation))
        throw UnphysicalState("k below 1e-9");
    return op;
}

SpectrumResult hb_spectrum(const QuadraticForm& q, double tol)
{
    q.validate();
    const Eigen::Index n = q.modes();
    Eigen::MatrixXcd d(2 * n, 2 * n);
    d << q.h, 2.0 * q.k.conjugate(), -2.0 * q.k, -q.h.transpose();

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(d);
    if (es.info() != Eigen::Success)
        throw EigensolverFailure("Hopfield-Bogoliubov matrix");

    std::vector<Eigen::Index> order(2 * n);
    for (Eigen::Index i = 0; i < 2 * n; ++i)
        order[i] = i;
    const auto& ev = es.eigenvalues();
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
        if (ev[a].real() != ev[b].real())
            return ev[a].real() < ev[b].real();
        return ev[a].imag() < ev[b].imag();
    });

    SpectrumResult out;
    for (auto i : order) {
        const Eigen::VectorXcd v = es.eigenvectors().col(i);
        const double top = v.head(n).squaredNorm(), bottom = v.tail(n).squaredNorm();
        const double w = (top - bottom) / (top + bottom);
        out.frequencies.push_back(ev[i]);
        out.norm_weights.push_back(w);
        out.symplectic_norms.push_back(std::abs(w) > 1e-8 ? (w > 0 ? 1.0 : -1.0) : 0.0);
        out.max_imag = std::max(out.max_imag, std::abs(ev[i].imag()));
    }
    out.is_real = out.max_imag < tol;
    return out;
}

const char* to_string(ClosedPhase ph)
{
    switch (ph) {
    case ClosedPhase::NP: return "NP";
    case ClosedPhase::SP1: return "SP1";
    case ClosedPhase::SP2: return "SP2";
    case ClosedPhase::eNP: return "eNP";
    }
    return "?";
}

std::string ClosedPhasePoint::label() const
{
    std::string s;
    for (auto ph : {ClosedPhase::NP, ClosedPhase::SP1, ClosedPhase::SP2, ClosedPhase::eNP})
        if (has(ph))
            s += (s.empty() ? "" : "+") + std::string(to_string(ph));
    return s.empty() ? "none" : s;
}

const ClosedCandidate* ClosedPhasePoint::find(ClosedPhase ph) const
{
    for (const auto& c : candidates)
        if (c.phase == ph)
            return &c;
    return nullptr;
}

ClosedPhasePoint classify_closed(const ModelParams& in, double spectral_tol, const OrderSolveControls& solver)
{
    const ModelParams p = canonical(in);
    ClosedPhasePoint out;
    const bool superradiant = np_boundary_residual(p) > 0;

    {
        ClosedCandidate np{superradiant ? ClosedPhase::eNP : ClosedPhase::NP, {}, 0.0, {}, false};
        np.spectrum = hb_spectrum(build_ns_form(p, np.order), spectral_tol);
        np.stable = np.spectrum.is_real;
        out.candidates.push_back(np);
    }

    bool sp_stable = false;
    if (superradiant) {
        const DerivedScalars d = derived_scalars(p);
        const bool balanced = std::abs(d.b_param) <= 1e-12 * d.l_param;
        out.u1_line = balanced;
        const cplx alpha = sp_alphas(p).front();
        ClosedCandidate sp{};
        sp.order = solve_order_params(alpha, p, solver);
        sp.energy = mean_field_energy(p, sp.order);
        sp.spectrum = hb_spectrum(build_ns_form(p, sp.order), spectral_tol);
        sp.stable = sp.spectrum.is_real;
        sp_stable = sp.stable;
        if (balanced) {
            sp.phase = ClosedPhase::SP1;
            out.candidates.push_back(sp);
            sp.phase = ClosedPhase::SP2;
            out.candidates.push_back(sp);
        } else {
            sp.phase = d.b_param > 0 ? ClosedPhase::SP1 : ClosedPhase::SP2;
            out.candidates.push_back(sp);
        }
    }

    for (const auto& c : out.candidates) {
        if (!c.stable)
            continue;
        if (c.phase == ClosedPhase::eNP && !sp_stable)
            continue;
        out.stable_mask |= static_cast<std::uint8_t>(c.phase);
    }
    return out;
}

} // namespace vdicke
