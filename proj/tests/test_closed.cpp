#include "vdicke/closed_phase.hpp"
#include "vdicke/errors.hpp"
#include "vdicke/fluctuations.hpp"
#include "vdicke/sweep.hpp"

#include <doctest.h>

#include <algorithm>

using namespace vdicke;

namespace {

const double lc = 1 / std::sqrt(2.0);

ModelParams params(double l1, double l2, double phi = pi / 4)
{
    ModelParams p;
    p.lambda1 = l1;
    p.lambda2 = l2;
    p.phi = phi;
    return p;
}

std::vector<double> real_parts(const SpectrumResult& s)
{
    std::vector<double> r;
    for (const auto& w : s.frequencies)
        r.push_back(w.real());
    std::sort(r.begin(), r.end());
    return r;
}

OrderParams from_real(const Eigen::Matrix<double, 6, 1>& x)
{
    return {cplx(x[0], x[1]), cplx(x[2], x[3]), cplx(x[4], x[5])};
}

} // namespace

// The amplitude reference comes from a direct minimization, good to ~1e-8 at a flat minimum.
TEST_CASE("superradiant amplitude and energy, single coupled level")
{
    const ModelParams p = params(1.5 * lc, 0.0);
    CHECK(sp_amplitude(p) == doctest::Approx(0.335927406351935).epsilon(1e-7));
    const auto alphas = sp_alphas(p);
    REQUIRE(alphas.size() == 2);
    CHECK(std::abs(alphas[0] + alphas[1]) < 1e-12);
    CHECK(me_landscape(alphas[0], p) == doctest::Approx(-0.086805555555556).epsilon(1e-10));
    CHECK_THROWS_AS(sp_amplitude(params(0.9 * lc, 0.0)), NotSuperradiant);
}

TEST_CASE("landscape: zero at the origin, minimized by the superradiant amplitude")
{
    const ModelParams p = params(1.5 * lc, 0.5 * lc);
    CHECK(me_landscape(0.0, p) == doctest::Approx(0.0).scale(1.0));
    const double a = sp_amplitude(p);
    const double e0 = me_landscape(a, p);
    for (double d : {-1e-3, 1e-3, -1e-2, 1e-2})
        CHECK(me_landscape(a + d, p) > e0);
    // Z2: alpha -> -alpha
    for (double x : {0.1, 0.3, 0.7})
        CHECK(me_landscape(x, p) == doctest::Approx(me_landscape(-x, p)).epsilon(1e-14));
}

TEST_CASE("U(1) flatness on the balanced line")
{
    const ModelParams p = params(1.3, 1.3, pi / 3);
    const double a = sp_amplitude(p);
    const double e0 = me_landscape(a, p);
    for (double th = 0.0; th < 2 * pi; th += 0.37)
        CHECK(me_landscape(std::polar(a, th), p) == doctest::Approx(e0).epsilon(1e-12));
    CHECK(classify_closed(p).u1_line);
}

TEST_CASE("stationary atomic displacements")
{
    const ModelParams p = params(1.5 * lc, 0.5 * lc);
    for (cplx alpha : sp_alphas(p)) {
        const OrderParams op = solve_order_params(alpha, p);
        CHECK(op.k() >= 0.0);
        for (const auto& r : equilibrium_residuals(p, op))
            CHECK(std::abs(r) < 1e-10);
        CHECK(mean_field_energy(p, op) == doctest::Approx(me_landscape(alpha, p)).epsilon(1e-10));
    }
}

TEST_CASE("excitation spectra")
{
    SUBCASE("normal phase")
    {
        const auto s = hb_spectrum(build_ns_form(params(0.5 * lc, 0.3 * lc), {}));
        CHECK(s.is_real);
        const std::vector<double> want{-2.022114640114, -0.477669869995, -0.427649245921,
                                       0.427649245921,  0.477669869995,  2.022114640114};
        const auto got = real_parts(s);
        for (std::size_t i = 0; i < 6; ++i)
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-10));
    }
    SUBCASE("superradiant phase")
    {
        const ModelParams p = params(1.5 * lc, 0.5 * lc);
        const auto alphas = sp_alphas(p);
        CHECK(std::abs(alphas[0].imag()) < 1e-12);
        const auto s = hb_spectrum(build_ns_form(p, solve_order_params(alphas[0], p)));
        CHECK(s.is_real);
        const std::vector<double> want{-2.0984119356, -0.9779361339, -0.7523891908,
                                       0.7523891908,  0.9779361339,  2.0984119356};
        const auto got = real_parts(s);
        for (std::size_t i = 0; i < 6; ++i)
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-8));
    }
    SUBCASE("single coupled level reduces to the two-level polariton pair")
    {
        const ModelParams p;
        for (double l : {0.1, 0.3, 0.5, 0.65}) {
            const ModelParams q = params(l, 0.0);
            const double w = p.omega, w0 = p.omega0;
            const double root = std::sqrt((w * w - w0 * w0) * (w * w - w0 * w0) + 8 * l * l * w * w0);
            const double em = std::sqrt(0.5 * (w * w + w0 * w0 - root));
            const double ep = std::sqrt(0.5 * (w * w + w0 * w0 + root));
            const auto got = real_parts(hb_spectrum(build_ns_form(q, {})));
            auto near = [&](double x) {
                return std::any_of(got.begin(), got.end(), [&](double g) { return std::abs(g - x) < 1e-10; });
            };
            CHECK(near(em));
            CHECK(near(ep));
            CHECK(near(w0));
        }
    }
    SUBCASE("softening at the boundary")
    {
        double prev = 1e300;
        for (double f : {0.9, 0.99, 0.999}) {
            const auto got = real_parts(hb_spectrum(build_ns_form(params(f * lc, 0.0), {})));
            const double soft = got[3];
            CHECK(soft < prev);
            prev = soft;
        }
        CHECK(prev < 0.05);
    }
}

TEST_CASE("quadratic form matches second derivatives of the energy")
{
    // H_ij = d2E / dz_i* dz_j and K_ij = 1/2 d2E / dz_i dz_j in z = (alpha, beta1, beta2)
    for (double phi : {pi / 4, 0.3 * pi}) {
        const ModelParams p = params(1.4, 0.5, phi);
        const cplx alpha = sp_alphas(p).front();
        const OrderParams op = solve_order_params(alpha, p);
        const QuadraticForm q = build_ns_form(p, op);
        q.validate();

        Eigen::Matrix<double, 6, 1> x;
        x << op.alpha.real(), op.alpha.imag(), op.beta1.real(), op.beta1.imag(), op.beta2.real(), op.beta2.imag();
        const double h = 1e-4;
        Eigen::Matrix<double, 6, 6> d2;
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) {
                auto e = [&](double sa, double sb) {
                    Eigen::Matrix<double, 6, 1> y = x;
                    y[a] += sa * h;
                    y[b] += sb * h;
                    return mean_field_energy(p, from_real(y));
                };
                d2(a, b) = (e(1, 1) - e(1, -1) - e(-1, 1) + e(-1, -1)) / (4 * h * h);
            }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double xx = d2(2 * i, 2 * j), yy = d2(2 * i + 1, 2 * j + 1);
                const double xy = d2(2 * i, 2 * j + 1), yx = d2(2 * i + 1, 2 * j);
                const cplx hij = 0.25 * cplx(xx + yy, yx - xy);
                const cplx kij = 0.125 * cplx(xx - yy, -(xy + yx));
                CHECK(std::abs(q.h(i, j) - hij) < 1e-6);
                CHECK(std::abs(q.k(i, j) - kij) < 1e-6);
            }
    }
}

TEST_CASE("closed classification")
{
    CHECK(classify_closed(params(0.3, 0.2)).label() == "NP");

    const ClosedPhasePoint sp1 = classify_closed(params(1.2, 0.3));
    CHECK(sp1.has(ClosedPhase::SP1));
    CHECK_FALSE(sp1.has(ClosedPhase::NP));
    CHECK_FALSE(sp1.u1_line);

    const ClosedPhasePoint sp2 = classify_closed(params(0.3, 1.2));
    CHECK(sp2.has(ClosedPhase::SP2));
    CHECK_FALSE(sp2.has(ClosedPhase::SP1));

    // the Z2 partners are degenerate
    const ClosedCandidate* c = sp1.find(ClosedPhase::SP1);
    REQUIRE(c != nullptr);
    const auto alphas = sp_alphas(params(1.2, 0.3));
    CHECK(me_landscape(alphas[0], params(1.2, 0.3)) == doctest::Approx(me_landscape(alphas[1], params(1.2, 0.3))));
    CHECK(c->stable);

    CHECK(classify_closed(params(1.0, 1.0)).u1_line);
}

TEST_CASE("closed sweeps")
{
    const ModelParams base = params(0.0, 0.0);
    GridSpec g;
    g.axes = {{AxisKind::Lambda1, 0.5 * lc, 1.5 * lc, 2}};
    const auto rows = sweep_closed(g, base, {});
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[0].result);
    REQUIRE(rows[1].result);
    CHECK(rows[0].result->label() == "NP");
    CHECK(rows[1].result->has(ClosedPhase::SP1));

    GridSpec diag;
    diag.axes = {{AxisKind::LambdaR, 1.2, 1.2, 1}};
    diag.ratio = 1.0;
    const auto d = sweep_closed(diag, base, {});
    REQUIRE(d.size() == 1);
    CHECK(d[0].result->u1_line);

    GridSpec empty;
    empty.axes = {{AxisKind::Lambda1, 0, 1, 0}};
    CHECK(sweep_closed(empty, base, {}).empty());

    GridSpec bad;
    bad.axes = {{AxisKind::Lambda1, 0, 1, 3}, {AxisKind::Lambda1, 0, 1, 3}};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
