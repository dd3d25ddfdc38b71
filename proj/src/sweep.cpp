#include "vdicke/sweep.hpp"

#include "vdicke/errors.hpp"

#include <array>
#include <cmath>

namespace vdicke {

namespace {

struct AxisName {
    AxisKind kind;
    const char* name;
};

constexpr std::array<AxisName, 9> kAxisNames{{
    {AxisKind::Lambda1, "lambda1"},
    {AxisKind::Lambda2, "lambda2"},
    {AxisKind::LambdaR, "lambda_r"},
    {AxisKind::Nu, "nu"},
    {AxisKind::Phi, "phi"},
    {AxisKind::PhiPi, "phi_pi"},
    {AxisKind::Kappa, "kappa"},
    {AxisKind::Omega, "omega"},
    {AxisKind::Omega0, "omega0"},
}};

void apply(ModelParams& p, AxisKind a, double v)
{
    switch (a) {
    case AxisKind::Lambda1: p.lambda1 = v; break;
    case AxisKind::Lambda2: p.lambda2 = v; break;
    case AxisKind::LambdaR:
    case AxisKind::Nu: break;  // resolved after all axes are applied
    case AxisKind::Phi: p.phi = v; break;
    case AxisKind::PhiPi: p.phi = v * pi; break;
    case AxisKind::Kappa: p.kappa = v; break;
    case AxisKind::Omega: p.omega = v; break;
    case AxisKind::Omega0: p.omega0 = v; break;
    }
}

} // namespace

AxisKind axis_from_string(const std::string& name)
{
    for (const auto& a : kAxisNames)
        if (name == a.name)
            return a.kind;
    throw ConfigError("unknown grid axis '" + name + "'");
}

const char* to_string(AxisKind a)
{
    for (const auto& n : kAxisNames)
        if (n.kind == a)
            return n.name;
    return "?";
}

std::size_t GridSpec::size() const
{
    std::size_t n = 1;
    for (const auto& a : axes)
        n *= static_cast<std::size_t>(std::max(a.n, 0));
    return n;
}

std::vector<double> GridSpec::coords(std::size_t index) const
{
    std::vector<double> c(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
        const auto n = static_cast<std::size_t>(axes[k].n);
        c[k] = axes[k].value(static_cast<int>(index % n));
        index /= n;
    }
    return c;
}

ModelParams with_ratio(ModelParams p, double ratio, std::optional<double> lambda_r)
{
    if (lambda_r) {
        p.lambda1 = *lambda_r / std::sqrt(1 + ratio * ratio);
        p.lambda2 = ratio * p.lambda1;
    } else {
        p.lambda2 = ratio * p.lambda1;
    }
    return p;
}

ModelParams GridSpec::params(const ModelParams& base, std::size_t index) const
{
    ModelParams p = base;
    std::optional<double> lr, nu;
    const auto c = coords(index);
    for (std::size_t k = 0; k < axes.size(); ++k) {
        apply(p, axes[k].kind, c[k]);
        if (axes[k].kind == AxisKind::LambdaR)
            lr = c[k];
        if (axes[k].kind == AxisKind::Nu)
            nu = c[k];
    }
    if (ratio)
        return with_ratio(p, *ratio, lr);
    if (lr || nu) {
        const double r = lr ? *lr : std::hypot(base.lambda1, base.lambda2);
        const double a = nu ? *nu : angle ? *angle : std::atan2(base.lambda2, base.lambda1);
        p.lambda1 = r * std::cos(a);
        p.lambda2 = r * std::sin(a);
    }
    return p;
}

bool GridSpec::has(AxisKind a) const
{
    for (const auto& x : axes)
        if (x.kind == a)
            return true;
    return false;
}

void GridSpec::validate() const
{
    bool seen[kAxisNames.size()] = {};
    for (const auto& a : axes) {
        const auto k = static_cast<int>(a.kind);
        if (seen[k])
            throw ConfigError(std::string("duplicate grid axis '") + to_string(a.kind) + "'");
        seen[k] = true;
        if (a.n < 0)
            throw ConfigError(std::string("negative point count on axis '") + to_string(a.kind) + "'");
        if (!std::isfinite(a.lo) || !std::isfinite(a.hi))
            throw ConfigError(std::string("non-finite range on axis '") + to_string(a.kind) + "'");
    }
    if (seen[int(AxisKind::Phi)] && seen[int(AxisKind::PhiPi)])
        throw ConfigError("axes 'phi' and 'phi_pi' are exclusive");
    const bool polar = seen[int(AxisKind::LambdaR)] || seen[int(AxisKind::Nu)];
    if (polar && (seen[int(AxisKind::Lambda1)] || seen[int(AxisKind::Lambda2)]))
        throw ConfigError("axes 'lambda_r' and 'nu' cannot be combined with 'lambda1' or 'lambda2'");
    if (ratio) {
        if (!std::isfinite(*ratio) || *ratio < 0)
            throw ConfigError("ratio must be finite and non-negative");
        if (seen[int(AxisKind::Lambda2)] || seen[int(AxisKind::Nu)])
            throw ConfigError("a fixed ratio cannot be combined with a 'lambda2' or 'nu' axis");
    }
}

int resolve_workers(int requested)
{
    if (requested > 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

template <class Row, class Eval>
std::vector<Row> run_sweep(const GridSpec& grid, const ModelParams& base, int workers, Eval eval)
{
    grid.validate();
    return parallel_map<Row>(grid.size(), workers, [&](std::size_t i) {
        Row row;
        row.point.index = i;
        row.point.coords = grid.coords(i);
        row.point.params = grid.params(base, i);
        try {
            row.result = eval(row.point.params);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        return row;
    });
}

} // namespace

std::vector<ClosedSweepRow> sweep_closed(const GridSpec& grid, const ModelParams& base, const SweepOptions& opt)
{
    return run_sweep<ClosedSweepRow>(grid, base, opt.workers,
                                     [&](const ModelParams& p) { return classify_closed(p, opt.spectral_tol, opt.solver); });
}

std::vector<OpenSweepRow> sweep_open(const GridSpec& grid, const ModelParams& base, const SweepOptions& opt)
{
    return run_sweep<OpenSweepRow>(grid, base, opt.workers,
                                   [&](const ModelParams& p) { return classify_open(p, opt.open); });
}

} // namespace vdicke
