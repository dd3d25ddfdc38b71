#include "vdicke/app.hpp"

#include "vdicke/errors.hpp"
#include "vdicke/su3.hpp"
#include "vdicke/version.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace vdicke {

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quoted(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s)
        q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

class Csv {
public:
    explicit Csv(const std::vector<std::string>& header) { row(header); }

    template <class... Cells>
    void add(Cells&&... cells)
    {
        std::vector<std::string> r;
        (push(r, std::forward<Cells>(cells)), ...);
        row(r);
    }
    void row(const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << quoted(cells[i]);
        out_ << "\n";
    }
    std::string str() const { return out_.str(); }

private:
    static void push(std::vector<std::string>& r, double v) { r.push_back(num(v)); }
    static void push(std::vector<std::string>& r, int v) { r.push_back(std::to_string(v)); }
    static void push(std::vector<std::string>& r, std::size_t v) { r.push_back(std::to_string(v)); }
    static void push(std::vector<std::string>& r, bool v) { r.push_back(v ? "1" : "0"); }
    static void push(std::vector<std::string>& r, const std::string& v) { r.push_back(v); }
    static void push(std::vector<std::string>& r, const char* v) { r.push_back(v); }
    static void push(std::vector<std::string>& r, const std::vector<std::string>& v)
    {
        r.insert(r.end(), v.begin(), v.end());
    }

    std::ostringstream out_;
};

const char* axis_unit(AxisKind a)
{
    switch (a) {
    case AxisKind::Phi:
    case AxisKind::Nu: return "rad";
    case AxisKind::PhiPi: return "pi";
    default: return "omega_tilde";
    }
}

// Grid coordinates followed by the resolved model parameters.
std::vector<std::string> point_header(const GridSpec& g)
{
    std::vector<std::string> h{"index"};
    for (const auto& a : g.axes)
        h.push_back(std::string("axis_") + to_string(a.kind) + " [" + axis_unit(a.kind) + "]");
    for (const char* c : {"lambda1 [omega_tilde]", "lambda2 [omega_tilde]", "phi [rad]", "kappa [omega_tilde]"})
        h.emplace_back(c);
    return h;
}

std::vector<std::string> point_cells(const SweepPoint& pt)
{
    std::vector<std::string> c{std::to_string(pt.index)};
    for (double x : pt.coords)
        c.push_back(num(x));
    for (double x : {pt.params.lambda1, pt.params.lambda2, pt.params.phi, pt.params.kappa})
        c.push_back(num(x));
    return c;
}

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

SweepPoint make_point(const GridSpec& g, const ModelParams& base, std::size_t i)
{
    return SweepPoint{i, g.coords(i), g.params(base, i)};
}

const ClosedCandidate* representative(const ClosedPhasePoint& r)
{
    const ClosedCandidate* best = nullptr;
    for (const auto& c : r.candidates)
        if (c.stable && (c.phase == ClosedPhase::SP1 || c.phase == ClosedPhase::SP2) &&
            (!best || c.energy < best->energy))
            best = &c;
    return best;
}

MeanFieldODEState initial_state(const RunConfig& cfg, const ModelParams& p)
{
    if (cfg.initial == InitialState::Normal)
        return normal_state(cfg.alpha0);
    MeanFieldODEState s;
    s.alpha = cfg.alpha0;
    s.lambda_exp = dark_state(p).single_atom_density.transpose();
    return s;
}

nlohmann::json attractor_json(const AttractorReport& r)
{
    return {{"kind", to_string(r.kind)},
            {"period", r.period},
            {"amplitude", r.amplitude},
            {"relative_amplitude", r.relative_amplitude},
            {"transient_time", r.transient_time}};
}

struct TaskResult {
    std::vector<Artifact> files;
    std::size_t points = 0;
    std::size_t failures = 0;
    nlohmann::json extra = nlohmann::json::object();
};

TaskResult run_sweep_closed(const RunConfig& cfg)
{
    const auto rows = sweep_closed(cfg.grid, cfg.base_params(), cfg.sweep_options());
    TaskResult r;
    r.points = rows.size();
    for (const auto& row : rows)
        r.failures += !row.error.empty();
    r.files.push_back({"dataset.csv", closed_csv(cfg.grid, rows)});
    return r;
}

TaskResult run_sweep_open(const RunConfig& cfg)
{
    const auto rows = sweep_open(cfg.grid, cfg.base_params(), cfg.sweep_options());
    TaskResult r;
    r.points = rows.size();
    for (const auto& row : rows)
        r.failures += !row.error.empty();
    r.files.push_back({"dataset.csv", open_csv(cfg.grid, rows)});
    return r;
}

TaskResult run_evolve(const RunConfig& cfg)
{
    const ModelParams p = canonical(cfg.base_params());
    const Trajectory tr = integrate(initial_state(cfg, p), p, cfg.t_end, cfg.open.integrator);
    TaskResult r;
    r.points = 1;
    r.files.push_back({"trajectory.csv", trajectory_csv(tr, p)});
    r.extra["attractor"] = attractor_json(detect_attractor(tr, cfg.open.attractor));
    r.extra["max_casimir_drift"] = tr.max_casimir_drift;
    r.extra["accepted_steps"] = tr.accepted;
    r.extra["rejected_steps"] = tr.rejected;
    return r;
}

TaskResult run_inverted(const RunConfig& cfg)
{
    struct Row {
        SweepPoint point;
        std::optional<InvertedRegion> region;
        std::string error;
    };
    const ModelParams base = cfg.base_params();
    cfg.grid.validate();
    const auto rows = parallel_map<Row>(cfg.grid.size(), cfg.workers, [&](std::size_t i) {
        Row row{make_point(cfg.grid, base, i), std::nullopt, {}};
        try {
            row.region = inverted_region(row.point.params, cfg.n_theta, cfg.n_n1, cfg.inverted_tol);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        return row;
    });

    Csv area(with(point_header(cfg.grid),
                  {"omega_scaled", "area_numeric [rad]", "area_formula [rad]", "area_literal [rad]",
                   "area_negated [rad]", "matched_sign", "dark_point_stable", "error"}));
    Csv boundary({"index", "theta [rad]", "n1_frac"});
    TaskResult r;
    r.points = rows.size();
    for (const auto& row : rows) {
        const auto pc = point_cells(row.point);
        if (!row.region) {
            ++r.failures;
            area.add(pc, "", "", "", "", "", "", "", row.error);
            continue;
        }
        const auto& g = *row.region;
        area.add(pc, g.omega_used, g.area, inverted_area_formula(canonical(row.point.params), g.omega_used),
                 g.area_literal, g.area_negated, to_string(g.matched), g.dark_point_stable, "");
        for (const auto& [th, n1] : g.boundary_samples)
            boundary.add(row.point.index, th, n1);
    }
    r.files.push_back({"area.csv", area.str()});
    r.files.push_back({"boundary.csv", boundary.str()});
    return r;
}

TaskResult run_fidelity(const RunConfig& cfg)
{
    struct Row {
        SweepPoint point;
        std::optional<SettleResult> settled;
        double fidelity = 0.0;
        double nu = 0.0;
        std::string error;
    };
    const ModelParams base = cfg.base_params();
    cfg.grid.validate();
    const auto rows = parallel_map<Row>(cfg.grid.size(), cfg.workers, [&](std::size_t i) {
        Row row{make_point(cfg.grid, base, i), std::nullopt, 0.0, 0.0, {}};
        try {
            const ModelParams p = canonical(row.point.params);
            const TargetState target = dark_state(p);
            row.nu = target.nu;
            row.settled = settle(p, initial_state(cfg, p), cfg.t_max, false, cfg.open.integrator, cfg.open.attractor);
            row.fidelity = fidelity(row.settled->report, target, cfg.fidelity_map, p.n_atoms);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        return row;
    });

    Csv csv(with(point_header(cfg.grid),
                 {"nu [rad]", "attractor", "t_final [1/omega_tilde]", "fidelity", "rho00", "error"}));
    TaskResult r;
    r.points = rows.size();
    for (const auto& row : rows) {
        r.failures += !row.error.empty();
        const auto pc = point_cells(row.point);
        if (!row.settled) {
            csv.add(pc, row.nu, "", "", "", "", row.error);
            continue;
        }
        const auto& s = *row.settled;
        csv.add(pc, row.nu, to_string(s.report.kind), s.t_final, row.error.empty() ? num(row.fidelity) : "",
                s.final_state.lambda_exp(0, 0).real(), row.error);
    }
    r.files.push_back({"fidelity.csv", csv.str()});
    return r;
}

TaskResult run_spectrum(const RunConfig& cfg)
{
    struct Mode {
        std::string source;
        int k;
        cplx value;
        double norm;
    };
    struct Row {
        SweepPoint point;
        std::vector<Mode> modes;
        std::string error;
    };
    const ModelParams base = cfg.base_params();
    cfg.grid.validate();
    const auto rows = parallel_map<Row>(cfg.grid.size(), cfg.workers, [&](std::size_t i) {
        Row row{make_point(cfg.grid, base, i), {}, {}};
        try {
            const ModelParams p = canonical(row.point.params);
            const ClosedPhasePoint cp = classify_closed(p, cfg.spectral_tol, cfg.solver);
            for (const auto& c : cp.candidates) {
                const std::string src = std::string("closed:") + to_string(c.phase);
                for (std::size_t k = 0; k < c.spectrum.frequencies.size(); ++k)
                    row.modes.push_back({src, int(k), c.spectrum.frequencies[k], c.spectrum.norm_weights[k]});
            }
            if (p.kappa > 0) {
                const auto np = np_rapidities(p);
                for (std::size_t k = 0; k < np.zetas.size(); ++k)
                    row.modes.push_back({"open:NP", int(k), np.zetas[k], 0.0});
                int n = 0;
                for (const auto& s : solve_sp_steady(p)) {
                    if (s.is_normal())
                        continue;
                    const auto z = steady_rapidities(p, s);
                    const std::string src = "open:SP" + std::to_string(n++);
                    for (std::size_t k = 0; k < z.zetas.size(); ++k)
                        row.modes.push_back({src, int(k), z.zetas[k], 0.0});
                }
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        return row;
    });

    Csv csv(with(point_header(cfg.grid),
                 {"source", "mode", "re [omega_tilde]", "im [omega_tilde]", "norm_weight", "error"}));
    TaskResult r;
    r.points = rows.size();
    for (const auto& row : rows) {
        const auto pc = point_cells(row.point);
        if (!row.error.empty()) {
            ++r.failures;
            csv.add(pc, "", "", "", "", "", row.error);
            continue;
        }
        for (const auto& m : row.modes)
            csv.add(pc, m.source, m.k, m.value.real(), m.value.imag(), m.norm, "");
    }
    r.files.push_back({"spectrum.csv", csv.str()});
    return r;
}

} // namespace

std::string closed_csv(const GridSpec& grid, const std::vector<ClosedSweepRow>& rows)
{
    Csv csv(with(point_header(grid),
                 {"label", "u1_line", "re_alpha [sqrt(N)]", "im_alpha [sqrt(N)]", "abs_beta1 [sqrt(N)]",
                  "abs_beta2 [sqrt(N)]", "np_max_abs_imag [omega_tilde]", "sp_max_abs_imag [omega_tilde]",
                  "energy_sp [omega_tilde per atom]", "error"}));
    for (const auto& row : rows) {
        const auto pc = point_cells(row.point);
        if (!row.result) {
            csv.add(pc, "", "", "", "", "", "", "", "", "", row.error);
            continue;
        }
        const auto& r = *row.result;
        const ClosedCandidate* np = r.candidates.empty() ? nullptr : &r.candidates.front();
        const ClosedCandidate* sp = representative(r);
        if (!sp)
            for (const auto& c : r.candidates)
                if (c.phase == ClosedPhase::SP1 || c.phase == ClosedPhase::SP2)
                    sp = &c;
        const OrderParams op = sp && sp->stable ? sp->order : OrderParams{};
        csv.add(pc, r.label(), r.u1_line, op.alpha.real(), op.alpha.imag(), std::abs(op.beta1), std::abs(op.beta2),
                np ? num(np->spectrum.max_imag) : "", sp ? num(sp->spectrum.max_imag) : "",
                sp ? num(sp->energy) : "", "");
    }
    return csv.str();
}

std::string open_csv(const GridSpec& grid, const std::vector<OpenSweepRow>& rows)
{
    Csv csv(with(point_header(grid),
                 {"label", "np_min_re_zeta [omega_tilde]", "sp_fixed_points", "sp_stable",
                  "sp_order_abs_L01 [N]", "sp_re_alpha [sqrt(N)]", "sp_im_alpha [sqrt(N)]", "inverted_stable",
                  "attractor", "period [1/omega_tilde]", "relative_amplitude", "error"}));
    for (const auto& row : rows) {
        const auto pc = point_cells(row.point);
        if (!row.result) {
            csv.add(pc, "", "", "", "", "", "", "", "", "", "", "", row.error);
            continue;
        }
        const auto& r = *row.result;
        const SteadyVerdict* best = nullptr;
        for (const auto& v : r.sp)
            if (v.stable && (!best || std::abs(v.state.lambda_exp(0, 1)) > std::abs(best->state.lambda_exp(0, 1))))
                best = &v;
        const cplx a = best ? best->state.cavity_alpha : cplx{};
        csv.add(pc, r.label(), r.np_min_real, r.sp.size(), r.sp_stable, r.stable_sp_order(), a.real(), a.imag(),
                r.inverted_stable, r.attractor ? to_string(r.attractor->kind) : "",
                r.attractor ? num(r.attractor->period) : "", r.attractor ? num(r.attractor->relative_amplitude) : "",
                "");
    }
    return csv.str();
}

std::string trajectory_csv(const Trajectory& traj, const ModelParams& p)
{
    Csv csv({"t [1/omega_tilde]", "re_alpha [sqrt(N)]", "im_alpha [sqrt(N)]", "L00 [N]", "L11 [N]", "L22 [N]",
             "re_L01 [N]", "im_L01 [N]", "re_L02 [N]", "im_L02 [N]", "re_L12 [N]", "im_L12 [N]",
             "trace_residual", "quadratic_residual", "cubic_residual", "energy [omega_tilde per atom]"});
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        const auto& s = traj.states[i];
        const auto& L = s.lambda_exp;
        const auto res = su3_residuals(L);
        csv.add(traj.t[i], s.alpha.real(), s.alpha.imag(), L(0, 0).real(), L(1, 1).real(), L(2, 2).real(),
                L(0, 1).real(), L(0, 1).imag(), L(0, 2).real(), L(0, 2).imag(), L(1, 2).real(), L(1, 2).imag(),
                res.trace, res.quadratic, res.cubic, mean_field_energy(s, p));
    }
    return csv.str();
}

RunOutcome execute(const RunConfig& cfg)
{
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    // model.nu must survive a lambda_r axis even when the base radius is zero
    RunConfig run = cfg;
    run.grid.angle = cfg.nu;
    TaskResult r;
    switch (cfg.task) {
    case TaskKind::SweepClosed: r = run_sweep_closed(run); break;
    case TaskKind::SweepOpen: r = run_sweep_open(run); break;
    case TaskKind::Evolve: r = run_evolve(run); break;
    case TaskKind::InvertedRegion: r = run_inverted(run); break;
    case TaskKind::FidelityScan: r = run_fidelity(run); break;
    case TaskKind::Spectrum: r = run_spectrum(run); break;
    }
    RunOutcome out;
    out.points = r.points;
    out.failures = r.failures;
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    nlohmann::json m;
    m["name"] = cfg.name;
    m["task"] = to_string(cfg.task);
    m["version"] = kVersion;
    m["schema_version"] = cfg.schema_version;
    m["omega_sign"] = to_string(kResolvedOmegaSign);
    m["workers"] = resolve_workers(cfg.workers);
    m["points"] = r.points;
    m["failures"] = r.failures;
    m["wall_time_s"] = out.wall_seconds;
    nlohmann::json fields = nlohmann::json::object();
    for (const auto& [k, v] : config_fields(cfg))
        fields[k] = v;
    m["config"] = fields;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& a : r.files)
        files.push_back(a.file);
    m["outputs"] = files;
    if (!r.extra.empty())
        m["result"] = r.extra;

    out.artifacts = std::move(r.files);
    out.artifacts.push_back({"manifest.json", m.dump(2) + "\n"});
    return out;
}

void write_outcome(const RunConfig& cfg, const RunOutcome& out)
{
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    for (const auto& a : out.artifacts) {
        std::ofstream f(fs::path(cfg.out_dir) / a.file, std::ios::binary);
        f << a.content;
        if (!f)
            throw Error("cannot write " + (fs::path(cfg.out_dir) / a.file).string());
    }
}

} // namespace vdicke
