#include "vdicke/dynamics.hpp"
#include "vdicke/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace vdicke {

namespace {

constexpr cplx I{0.0, 1.0};

constexpr int kUpper[3][2] = {{0, 1}, {0, 2}, {1, 2}};

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension coefficients.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

double drift_between(const Su3Invariants& a, const Su3Invariants& b)
{
    auto rel = [](double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(y)); };
    return std::max({rel(a.trace, b.trace), rel(a.quadratic, b.quadratic), rel(a.cubic, b.cubic)});
}

} // namespace

Packed pack(const MeanFieldODEState& s)
{
    Packed x;
    x[0] = s.alpha.real();
    x[1] = s.alpha.imag();
    for (int i = 0; i < 3; ++i)
        x[2 + i] = s.lambda_exp(i, i).real();
    for (int m = 0; m < 3; ++m) {
        x[5 + 2 * m] = s.lambda_exp(kUpper[m][0], kUpper[m][1]).real();
        x[6 + 2 * m] = s.lambda_exp(kUpper[m][0], kUpper[m][1]).imag();
    }
    return x;
}

MeanFieldODEState unpack(const Packed& x)
{
    // Hermiticity holds by construction of the real coordinates.
    MeanFieldODEState s;
    s.alpha = cplx(x[0], x[1]);
    for (int i = 0; i < 3; ++i)
        s.lambda_exp(i, i) = x[2 + i];
    for (int m = 0; m < 3; ++m) {
        const cplx v(x[5 + 2 * m], x[6 + 2 * m]);
        s.lambda_exp(kUpper[m][0], kUpper[m][1]) = v;
        s.lambda_exp(kUpper[m][1], kUpper[m][0]) = std::conj(v);
    }
    return s;
}

MeanFieldODEState normal_state(cplx alpha)
{
    MeanFieldODEState s;
    s.alpha = alpha;
    s.lambda_exp(0, 0) = 1.0;
    return s;
}

MeanFieldODEState product_state(const Eigen::Vector3cd& psi, cplx alpha)
{
    const Eigen::Vector3cd v = psi.normalized();
    MeanFieldODEState s;
    s.alpha = alpha;
    s.lambda_exp = (v * v.adjoint()).transpose();
    return s;
}

MeanFieldODEState eom_rhs(const MeanFieldODEState& s, const ModelParams& p)
{
    const double sn = std::sin(p.phi), cs = std::cos(p.phi);
    const Mat3 rho = s.lambda_exp.transpose();
    const Mat3 h = mean_field_hamiltonian(p, s.alpha);

    MeanFieldODEState d;
    d.lambda_exp = (-I * (h * rho - rho * h)).transpose();
    d.alpha = -(I * p.omega + p.kappa) * s.alpha
        - I * p.lambda1 * (cs * rho(0, 1) + sn * rho(1, 0))
        - p.lambda2 * (cs * rho(0, 2) + sn * rho(2, 0));
    return d;
}

Packed eom_rhs(const Packed& x, const ModelParams& p)
{
    return pack(eom_rhs(unpack(x), p));
}

Eigen::Matrix<double, 11, 11> eom_jacobian(const MeanFieldODEState& s, const ModelParams& p, double h)
{
    const Packed x = pack(s);
    Eigen::Matrix<double, 11, 11> j;
    for (int c = 0; c < 11; ++c) {
        Packed xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        j.col(c) = (eom_rhs(xp, p) - eom_rhs(xm, p)) / (2 * h);
    }
    return j;
}

double mean_field_energy(const MeanFieldODEState& s, const ModelParams& p)
{
    const Mat3 rho = s.lambda_exp.transpose();
    return p.omega * std::norm(s.alpha) + (mean_field_hamiltonian(p, s.alpha) * rho).trace().real();
}

DormandPrince::DormandPrince(const ModelParams& p, const MeanFieldODEState& s0, const IntegratorControls& ctl)
    : p_(canonical(p))
    , ctl_(ctl)
    , x_(pack(s0))
    , h_(std::min(ctl.first_step, ctl.max_step))
    , inv0_(su3_invariants(s0.lambda_exp))
{
    if (!(ctl.rtol > 0) || !(ctl.atol >= 0) || !(ctl.max_step > 0) || !(ctl.stride > 0))
        throw DomainError("integrator tolerances, max_step and stride must be positive");
    k1_ = eom_rhs(x_, p_);
}

void DormandPrince::check_drift()
{
    const double d = drift_between(su3_invariants(unpack(x_).lambda_exp), inv0_);
    drift_ = std::max(drift_, d);
    if (drift_ > ctl_.drift_limit)
        throw ConstraintDriftExceeded("SU(3) invariant drift " + std::to_string(drift_));
}

void DormandPrince::advance(double t_end, const std::function<void(double, const Packed&)>& sample)
{
    auto emit_until = [&](double t_hi, auto&& interp) {
        while (next_sample_ <= t_hi + 1e-12 * std::max(1.0, std::abs(t_hi))) {
            if (sample)
                sample(next_sample_, interp(next_sample_));
            next_sample_ = std::round(next_sample_ / ctl_.stride + 1) * ctl_.stride;
        }
    };

    if (t_ == 0.0 && next_sample_ == 0.0 && t_end >= 0.0)
        emit_until(0.0, [&](double) { return x_; });

    while (t_ < t_end) {
        if (accepted_ + rejected_ >= ctl_.max_steps)
            throw StepSizeUnderflow("step budget exhausted at t = " + std::to_string(t_));
        double h = std::min({h_, ctl_.max_step, t_end - t_});
        if (h < 1e-14 * std::max(1.0, std::abs(t_)))
            throw StepSizeUnderflow("step size underflow at t = " + std::to_string(t_));

        const Packed& k1 = k1_;
        const Packed k2 = eom_rhs(Packed(x_ + h * a21 * k1), p_);
        const Packed k3 = eom_rhs(Packed(x_ + h * (a31 * k1 + a32 * k2)), p_);
        const Packed k4 = eom_rhs(Packed(x_ + h * (a41 * k1 + a42 * k2 + a43 * k3)), p_);
        const Packed k5 = eom_rhs(Packed(x_ + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)), p_);
        const Packed k6 = eom_rhs(Packed(x_ + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)), p_);
        const Packed x1 = x_ + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const Packed k7 = eom_rhs(x1, p_);

        const Packed err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const Packed scale = (ctl_.atol + ctl_.rtol * x_.cwiseAbs().cwiseMax(x1.cwiseAbs()).array()).matrix();
        const double en = std::sqrt((err.cwiseQuotient(scale)).squaredNorm() / 11.0);

        if (!std::isfinite(en) || en > 1.0) {
            ++rejected_;
            h_ = h * std::max(0.2, 0.9 * std::pow(std::isfinite(en) ? en : 1e10, -0.2));
            continue;
        }

        const Packed diff = x1 - x_;
        const Packed r3 = h * k1 - diff;
        const Packed r4 = diff - h * k7 - r3;
        const Packed r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        const Packed x0 = x_;
        const double t0 = t_;
        auto interp = [&](double ts) -> Packed {
            const double th = (ts - t0) / h, th1 = 1.0 - th;
            return x0 + th * (diff + th1 * (r3 + th * (r4 + th1 * r5)));
        };

        x_ = x1;
        k1_ = k7;
        t_ = (t_end - t_ - h <= 0.0) ? t_end : t_ + h;
        ++accepted_;
        check_drift();
        emit_until(t_, interp);

        const double fac = en > 0 ? 0.9 * std::pow(en, -0.2) : 5.0;
        h_ = std::min(ctl_.max_step, h * std::clamp(fac, 0.2, 5.0));
    }
}

Trajectory integrate(const MeanFieldODEState& s0, const ModelParams& p, double t_end, const IntegratorControls& ctl)
{
    if (t_end < 0)
        throw DomainError("t_end must be non-negative");
    Trajectory tr;
    DormandPrince dp(p, s0, ctl);
    dp.advance(t_end, [&](double t, const Packed& x) {
        if (t + 1e-12 >= ctl.record_from) {
            tr.t.push_back(t);
            tr.states.push_back(unpack(x));
        }
    });
    if (tr.t.empty() || tr.t.back() < t_end - 1e-12 * std::max(1.0, t_end)) {
        tr.t.push_back(t_end);
        tr.states.push_back(unpack(dp.state()));
    }
    tr.max_casimir_drift = dp.max_casimir_drift();
    tr.accepted = dp.accepted();
    tr.rejected = dp.rejected();
    return tr;
}

const char* to_string(AttractorKind k)
{
    switch (k) {
    case AttractorKind::FixedPoint: return "fixed_point";
    case AttractorKind::LimitCycle: return "limit_cycle";
    case AttractorKind::Unresolved: return "unresolved";
    }
    return "?";
}

double AttractorControls::transient_for(double kappa) const
{
    if (transient >= 0)
        return transient;
    return kappa > 0 ? std::max(20.0 / kappa, 1000.0) : 1000.0;
}

namespace {

struct WindowStats {
    double period = 0.0;       // 0 when no oscillation period is found
    double amplitude = 0.0;    // half peak-to-peak of the chosen component
    double relative = 0.0;
    double recurrence = 0.0;   // worst peak-height mismatch one period apart, over amplitude
};

// Period from the first autocorrelation maximum after its first zero crossing,
// refined by a parabola through the three neighbouring lags.
double acf_period(const std::vector<double>& y, double dt)
{
    const std::size_t n = y.size();
    if (n < 8)
        return 0.0;
    double mean = 0.0;
    for (double v : y)
        mean += v;
    mean /= double(n);
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i)
        z[i] = y[i] - mean;

    const std::size_t max_lag = n / 2;
    std::vector<double> acf(max_lag + 1);
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i)
            s += z[i] * z[i + lag];
        acf[lag] = s / double(n - lag);
    }
    if (!(acf[0] > 0))
        return 0.0;

    std::size_t lag = 1;
    while (lag <= max_lag && acf[lag] > 0)
        ++lag;
    for (; lag + 1 <= max_lag; ++lag) {
        if (acf[lag] >= acf[lag - 1] && acf[lag] >= acf[lag + 1] && acf[lag] > 0.3 * acf[0]) {
            const double ym = acf[lag - 1], y0 = acf[lag], yp = acf[lag + 1];
            const double den = ym - 2 * y0 + yp;
            const double shift = den != 0 ? 0.5 * (ym - yp) / den : 0.0;
            return (double(lag) + shift) * dt;
        }
    }
    return 0.0;
}

WindowStats window_stats(const std::vector<Packed>& xs, int component, double dt)
{
    WindowStats w;
    Packed mean = Packed::Zero();
    for (const auto& x : xs)
        mean += x;
    mean /= double(xs.size());
    double lo = xs.front()[component], hi = lo, dev = 0.0;
    std::vector<double> y;
    y.reserve(xs.size());
    for (const auto& x : xs) {
        lo = std::min(lo, x[component]);
        hi = std::max(hi, x[component]);
        dev = std::max(dev, (x - mean).norm());
        y.push_back(x[component]);
    }
    w.amplitude = 0.5 * (hi - lo);
    w.relative = dev / std::max(mean.norm(), 1e-300);
    w.period = acf_period(y, dt);

    // A true cycle repeats its peak pattern; chaotic or quasi-periodic motion does not.
    std::vector<std::pair<double, double>> peaks;  // (time, height), parabola-refined
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            const double den = y[i - 1] - 2 * y[i] + y[i + 1];
            const double shift = den != 0 ? 0.5 * (y[i - 1] - y[i + 1]) / den : 0.0;
            peaks.emplace_back((double(i) + shift) * dt, y[i] - 0.25 * (y[i - 1] - y[i + 1]) * shift);
        }
    }
    if (w.period > 0 && peaks.size() >= 3 && w.amplitude > 0) {
        for (std::size_t j = 0; j < peaks.size(); ++j) {
            // partner: the peak closest to one period later
            std::size_t best = j;
            double gap = 1e300;
            for (std::size_t k = j + 1; k < peaks.size(); ++k) {
                const double g = std::abs(peaks[k].first - peaks[j].first - w.period);
                if (g < gap) {
                    gap = g;
                    best = k;
                }
            }
            if (best == j)
                continue;
            if (gap > 0.1 * w.period) {
                w.recurrence = std::numeric_limits<double>::infinity();
                break;
            }
            w.recurrence = std::max(w.recurrence, std::abs(peaks[best].second - peaks[j].second) / w.amplitude);
        }
    }
    return w;
}

} // namespace

AttractorReport detect_attractor(const Trajectory& traj, const AttractorControls& ctl)
{
    AttractorReport rep;
    const std::size_t n = traj.t.size();
    if (n < 16)
        return rep;
    const double t_end = traj.t.back();
    const double t_start = t_end - 2 * ctl.window;
    if (traj.t.front() > t_start + 1e-9)
        return rep;
    rep.transient_time = t_start;

    std::vector<Packed> a, b;
    for (std::size_t i = 0; i < n; ++i) {
        if (traj.t[i] < t_start - 1e-9)
            continue;
        (traj.t[i] < t_end - ctl.window ? a : b).push_back(pack(traj.states[i]));
    }
    if (a.size() < 8 || b.size() < 8)
        return rep;

    const Packed last = b.back();
    double var = 0.0;
    for (const auto* win : {&a, &b})
        for (const auto& x : *win)
            var = std::max(var, (x - last).norm());
    if (var <= ctl.fp_tol * std::max(last.norm(), 1e-300)) {
        rep.kind = AttractorKind::FixedPoint;
        rep.fixed_state = unpack(last);
        return rep;
    }

    int comp = 0;
    double best = -1.0;
    for (int c = 0; c < 11; ++c) {
        double m = 0.0, s = 0.0;
        for (const auto& x : b)
            m += x[c];
        m /= double(b.size());
        for (const auto& x : b)
            s += (x[c] - m) * (x[c] - m);
        if (s > best) {
            best = s;
            comp = c;
        }
    }

    const double dt = (t_end - t_start) / double(a.size() + b.size() - 1);
    const WindowStats wa = window_stats(a, comp, dt);
    const WindowStats wb = window_stats(b, comp, dt);
    rep.amplitude = wb.amplitude;
    rep.relative_amplitude = wb.relative;
    rep.period = wb.period;

    const bool periodic = wa.period > 0 && wb.period > 0
        && std::abs(wa.period - wb.period) <= ctl.period_tol * wb.period;
    const bool persistent = wb.relative > ctl.amplitude_floor
        && std::abs(wb.amplitude - wa.amplitude) <= 0.02 * wa.amplitude
        && std::max(wa.recurrence, wb.recurrence) <= ctl.recurrence_tol;
    if (periodic && persistent)
        rep.kind = AttractorKind::LimitCycle;
    return rep;
}

SettleResult settle(const ModelParams& p, const MeanFieldODEState& s0, double t_max, bool accept_cycle,
                    const IntegratorControls& ictl, const AttractorControls& actl)
{
    DormandPrince dp(p, s0, ictl);
    std::deque<std::pair<double, Packed>> buf;
    const double span = 2 * actl.window;
    double target = std::min(t_max, actl.transient_for(p.kappa) + span);

    SettleResult out;
    for (;;) {
        dp.advance(target, [&](double t, const Packed& x) {
            buf.emplace_back(t, x);
            while (!buf.empty() && buf.front().first < t - span - 1e-9)
                buf.pop_front();
        });
        Trajectory tr;
        for (const auto& [t, x] : buf) {
            tr.t.push_back(t);
            tr.states.push_back(unpack(x));
        }
        out.report = detect_attractor(tr, actl);
        const bool done = out.report.kind == AttractorKind::FixedPoint
            || (accept_cycle && out.report.kind == AttractorKind::LimitCycle);
        if (done || target >= t_max)
            break;
        target = std::min(t_max, 2 * target);
    }
    out.final_state = unpack(dp.state());
    out.t_final = dp.time();
    out.max_casimir_drift = dp.max_casimir_drift();
    return out;
}

TargetState dark_state(const ModelParams& p)
{
    if (p.lambda1 == 0.0 && p.lambda2 == 0.0)
        throw BothCouplingsZero("dark state needs a nonzero coupling");
    TargetState t;
    t.nu = std::atan2(p.lambda2, p.lambda1);
    Eigen::Vector3cd psi(0.0, I * std::sin(t.nu), std::cos(t.nu));
    t.single_atom_density = psi * psi.adjoint();
    t.n1_frac = std::sin(t.nu) * std::sin(t.nu);
    t.theta = 1.5 * pi;
    return t;
}

double fidelity(const MeanFieldODEState& steady, const TargetState& target, FidelityMap map, double n_atoms)
{
    const Mat3 rho = steady.lambda_exp.transpose();
    const double f = std::clamp((rho * target.single_atom_density).trace().real(), 0.0, 1.0);
    return map == FidelityMap::ProductN ? std::pow(f, n_atoms) : f;
}

double fidelity(const AttractorReport& steady, const TargetState& target, FidelityMap map, double n_atoms)
{
    if (steady.kind != AttractorKind::FixedPoint)
        throw NotConverged(std::string("attractor is ") + to_string(steady.kind));
    return fidelity(steady.fixed_state, target, map, n_atoms);
}

} // namespace vdicke
