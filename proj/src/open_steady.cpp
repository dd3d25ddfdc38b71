#include "vdicke/open_steady.hpp"
#include "vdicke/closed_phase.hpp"
#include "vdicke/errors.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace vdicke {

namespace {

constexpr cplx I{0.0, 1.0};

bool newton_alpha(const ModelParams& p, cplx& a, const SteadySolveControls& ctl)
{
    auto f = [&](cplx z) { return cavity_residual(p, z, ctl.branch); };
    cplx r = f(a);
    for (int it = 0; it < ctl.max_iter; ++it) {
        if (std::abs(r) < ctl.tol)
            return true;
        constexpr double h = 1e-7;
        const cplx fx = (f(a + h) - f(a - h)) / (2 * h);
        const cplx fy = (f(a + I * h) - f(a - I * h)) / (2 * h);
        Eigen::Matrix2d j;
        j << fx.real(), fy.real(), fx.imag(), fy.imag();
        const double det = j.determinant();
        if (!std::isfinite(det) || std::abs(det) < 1e-300)
            return false;
        const Eigen::Vector2d d = j.partialPivLu().solve(Eigen::Vector2d(-r.real(), -r.imag()));
        double t = 1.0;
        cplx an = a + t * cplx(d[0], d[1]);
        cplx rn = f(an);
        while (!(std::abs(rn) < std::abs(r)) && t > 1e-4) {
            t *= 0.5;
            an = a + t * cplx(d[0], d[1]);
            rn = f(an);
        }
        if (!(std::abs(rn) < std::abs(r)))
            return false;
        a = an;
        r = rn;
    }
    return std::abs(r) < 1e-10;
}

RapiditySet sorted_rapidities(const Eigen::VectorXcd& ev)
{
    RapiditySet rs;
    rs.zetas.assign(ev.data(), ev.data() + ev.size());
    std::sort(rs.zetas.begin(), rs.zetas.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    rs.min_real = rs.zetas.empty() ? 0.0 : rs.zetas.front().real();
    return rs;
}

bool inverted_stable_at(const ModelParams& p, double n1, double theta, double tol)
{
    return inverted_rapidities(p, n1, theta).min_real >= -tol;
}

} // namespace

Mat3 atomic_expectations(cplx m1, cplx m2, double omega0, AtomicBranch branch)
{
    const double mm = std::norm(m1) + std::norm(m2);
    Mat3 l = Mat3::Zero();
    if (mm == 0.0) {
        if (branch == AtomicBranch::Upper)
            throw DomainError("upper branch undefined for vanishing fields");
        l(0, 0) = 1.0;
        return l;
    }
    const double sg = branch == AtomicBranch::Lower ? -1.0 : 1.0;
    const double r = std::sqrt(omega0 * omega0 + 4 * mm);
    const double w = (1 + sg * omega0 / r) / (2 * mm);
    l(0, 0) = 0.5 - sg * omega0 / (2 * r);
    l(0, 1) = sg * m1 / r;
    l(0, 2) = sg * m2 / r;
    l(1, 1) = std::norm(m1) * w;
    l(2, 2) = std::norm(m2) * w;
    l(1, 2) = std::conj(m1) * m2 * w;
    l(1, 0) = std::conj(l(0, 1));
    l(2, 0) = std::conj(l(0, 2));
    l(2, 1) = std::conj(l(1, 2));
    return l;
}

OrderParams SteadyAtomicState::order_params() const
{
    const double p0 = lambda_exp(0, 0).real();
    if (!(p0 > 0))
        throw UnphysicalState("no ground-level population");
    const double u = std::sqrt(p0);
    return {cavity_alpha, lambda_exp(0, 1) / u, lambda_exp(0, 2) / u};
}

cplx cavity_residual(const ModelParams& p, cplx alpha, AtomicBranch branch)
{
    const auto f = coupling_fields(p, alpha);
    const Mat3 l = atomic_expectations(f.g1, f.g2, p.omega0, branch);
    const double s = std::sin(p.phi), c = std::cos(p.phi);
    return -(I * p.omega + p.kappa) * alpha - I * p.lambda1 * (c * l(1, 0) + s * l(0, 1))
        - p.lambda2 * (c * l(2, 0) + s * l(0, 2));
}

SteadyAtomicState steady_state_at(const ModelParams& in, cplx alpha, AtomicBranch branch)
{
    const ModelParams p = canonical(in);
    const auto f = coupling_fields(p, alpha);
    SteadyAtomicState s;
    s.cavity_alpha = alpha;
    s.m1 = f.g1;
    s.m2 = f.g2;
    s.lambda_exp = atomic_expectations(f.g1, f.g2, p.omega0, branch);
    MeanFieldODEState m{alpha, s.lambda_exp};
    s.residual = pack(eom_rhs(m, p)).norm();
    return s;
}

std::vector<cplx> default_seeds(const ModelParams& p, int n, double radius)
{
    std::vector<cplx> seeds;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = n > 1 ? -radius + 2 * radius * i / (n - 1) : 0.0;
            const double y = n > 1 ? -radius + 2 * radius * j / (n - 1) : 0.0;
            seeds.emplace_back(x, y);
        }
    if (np_boundary_residual(p) > 0)
        for (cplx a : sp_alphas(p))
            seeds.push_back(a);
    return seeds;
}

std::vector<SteadyAtomicState> solve_sp_steady(const ModelParams& in, const std::vector<cplx>& seeds,
                                               const SteadySolveControls& ctl)
{
    const ModelParams p = canonical(in);
    std::vector<cplx> found;
    for (cplx a : seeds) {
        if (!newton_alpha(p, a, ctl))
            continue;
        if (std::abs(a) < 1e-9)
            continue;
        const bool dup = std::any_of(found.begin(), found.end(),
                                     [&](cplx b) { return std::abs(a - b) < ctl.dedup_tol; });
        if (!dup)
            found.push_back(a);
    }
    std::sort(found.begin(), found.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });

    std::vector<SteadyAtomicState> out;
    SteadyAtomicState np;
    np.lambda_exp(0, 0) = 1.0;
    out.push_back(np);

    std::vector<bool> used(found.size(), false);
    for (std::size_t i = 0; i < found.size(); ++i) {
        if (used[i])
            continue;
        used[i] = true;
        SteadyAtomicState s = steady_state_at(p, found[i], ctl.branch);
        for (std::size_t j = i + 1; j < found.size(); ++j)
            if (!used[j] && std::abs(found[j] + found[i]) < ctl.dedup_tol) {
                used[j] = true;
                s.multiplicity = 2;
            }
        out.push_back(s);
    }
    return out;
}

std::vector<SteadyAtomicState> solve_sp_steady(const ModelParams& p)
{
    return solve_sp_steady(p, default_seeds(canonical(p)));
}

Eigen::MatrixXcd shape_matrix(const QuadraticForm& q, double kappa)
{
    q.validate();
    const Eigen::Index n = q.modes();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    m(0, 0) = kappa;
    Eigen::MatrixXcd chi(2 * n, 2 * n);
    chi << I * q.h + m, 2.0 * I * q.k.conjugate(), -2.0 * I * q.k, -I * q.h.conjugate() + m;
    return 0.5 * chi;
}

RapiditySet rapidities(const Eigen::MatrixXcd& chi)
{
    if (chi.rows() != chi.cols())
        throw DomainError("shape matrix must be square");
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(chi, false);
    if (es.info() != Eigen::Success)
        throw EigensolverFailure("shape matrix");
    return sorted_rapidities(es.eigenvalues());
}

RapiditySet np_rapidities(const ModelParams& p)
{
    return rapidities(shape_matrix(build_ns_form(p, {}), p.kappa));
}

RapiditySet steady_rapidities(const ModelParams& p, const SteadyAtomicState& s)
{
    return rapidities(shape_matrix(build_ns_form(p, s.order_params()), p.kappa));
}

RapiditySet inverted_rapidities(const ModelParams& p, double n1_frac, double theta)
{
    return rapidities(shape_matrix(build_inverted_form(p, n1_frac, theta), p.kappa));
}

std::string OpenPhaseRecord::label() const
{
    if (np_stable && sp_stable)
        return "NP+SP";
    if (np_stable)
        return "NP";
    if (sp_stable)
        return os ? "SP+OS" : "SP";
    if (os)
        return "OS";
    return "none";
}

double OpenPhaseRecord::stable_sp_order() const
{
    double best = 0.0;
    for (const auto& v : sp)
        if (v.stable)
            best = std::max(best, std::abs(v.state.lambda_exp(0, 1)));
    return best;
}

OpenPhaseRecord classify_open(const ModelParams& in, const OpenClassifyControls& ctl)
{
    const ModelParams p = canonical(in);
    OpenPhaseRecord rec;

    const RapiditySet np = np_rapidities(p);
    rec.np_min_real = np.min_real;
    rec.np_stable = np.stable(ctl.stability_tol);
    rec.np_marginal = np.marginal(ctl.stability_tol);

    for (const auto& s : solve_sp_steady(p)) {
        if (s.is_normal())
            continue;
        SteadyVerdict v{s, steady_rapidities(p, s), false};
        v.stable = v.rapidities.stable(ctl.stability_tol);
        rec.sp_stable = rec.sp_stable || v.stable;
        rec.sp.push_back(std::move(v));
    }

    if (p.lambda1 > 0 || p.lambda2 > 0) {
        const TargetState d = dark_state(p);
        rec.inverted_stable = inverted_stable_at(p, d.n1_frac, d.theta, ctl.stability_tol);
    }
    for (int i = 0; i < 16 && !rec.inverted_stable; ++i)
        for (int j = 0; j <= 16 && !rec.inverted_stable; ++j)
            rec.inverted_stable = inverted_stable_at(p, j / 16.0, (i + 0.5) * 2 * pi / 16, ctl.stability_tol);

    const bool probe = ctl.os_probe == OsProbe::NpUnstable ? !rec.np_stable
                     : ctl.os_probe == OsProbe::NoStableFixedPoint ? !rec.np_stable && !rec.sp_stable
                                                                   : false;
    if (probe) {
        const SettleResult r = settle(p, normal_state(0.01), ctl.os_t_max, true, ctl.integrator, ctl.attractor);
        rec.attractor = r.report;
        rec.os = r.report.kind == AttractorKind::LimitCycle;
    }
    return rec;
}

double inverted_area_formula(const ModelParams& p, double om)
{
    const double a = p.lambda1 * p.lambda1, b = p.lambda2 * p.lambda2;
    if (a + b == 0.0)
        return 2 * pi;
    const double den = std::sqrt(om * om * (a - b) * (a - b) + 4 * a * b);
    if (den == 0.0)
        return pi;
    return std::clamp(pi * (1 - om * (a + b) / den), 0.0, 2 * pi);
}

InvertedRegion inverted_region(const ModelParams& in, int n_theta, int n_n1, double tol)
{
    if (n_theta < 32 || n_n1 < 32)
        throw DomainError("inverted-region grid must be at least 32 x 32");
    const ModelParams p = canonical(in);
    InvertedRegion reg;
    const double dth = 2 * pi / n_theta;

    double area = 0.0;
    std::vector<char> col(n_n1);
    for (int i = 0; i < n_theta; ++i) {
        const double th = (i + 0.5) * dth;
        for (int j = 0; j < n_n1; ++j)
            col[j] = inverted_stable_at(p, double(j) / (n_n1 - 1), th, tol);
        double len = 0.0;
        for (int j = 0; j + 1 < n_n1; ++j) {
            const double lo = double(j) / (n_n1 - 1), hi = double(j + 1) / (n_n1 - 1);
            if (col[j] && col[j + 1]) {
                len += hi - lo;
                continue;
            }
            if (!col[j] && !col[j + 1])
                continue;
            double a = lo, b = hi;
            for (int it = 0; it < 52 && b - a > 1e-15; ++it) {
                const double m = 0.5 * (a + b);
                (inverted_stable_at(p, m, th, tol) == bool(col[j]) ? a : b) = m;
            }
            const double nb = 0.5 * (a + b);
            reg.boundary_samples.emplace_back(th, nb);
            len += col[j] ? nb - lo : hi - nb;
        }
        area += len * dth;
    }

    reg.area = area;
    reg.omega_used = omega_scaled(p);
    reg.area_literal = inverted_area_formula(p, omega_scaled(p, OmegaSign::Literal));
    reg.area_negated = inverted_area_formula(p, omega_scaled(p, OmegaSign::Negated));
    reg.matched = std::abs(area - reg.area_literal) < std::abs(area - reg.area_negated) ? OmegaSign::Literal
                                                                                        : OmegaSign::Negated;
    if (p.lambda1 > 0 || p.lambda2 > 0) {
        const TargetState d = dark_state(p);
        reg.dark_point_stable = inverted_stable_at(p, d.n1_frac, d.theta, tol);
    }
    return reg;
}

} // namespace vdicke
