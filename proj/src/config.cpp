#include "vdicke/config.hpp"

#include "vdicke/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace vdicke {

namespace {

struct TaskName {
    TaskKind kind;
    const char* name;
};

constexpr TaskName kTasks[] = {
    {TaskKind::SweepClosed, "sweep-closed"},
    {TaskKind::SweepOpen, "sweep-open"},
    {TaskKind::Evolve, "evolve"},
    {TaskKind::InvertedRegion, "inverted-region"},
    {TaskKind::FidelityScan, "fidelity-scan"},
    {TaskKind::Spectrum, "spectrum"},
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Recursive-descent evaluator for the numeric literals accepted in configs.
class NumberParser {
public:
    explicit NumberParser(const std::string& s) : s_(s) {}

    double run()
    {
        const double v = expr();
        skip();
        if (i_ != s_.size())
            fail();
        return v;
    }

private:
    void skip()
    {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_])))
            ++i_;
    }
    bool eat(char c)
    {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    bool word(const char* w)
    {
        skip();
        const std::size_t n = std::char_traits<char>::length(w);
        if (s_.compare(i_, n, w) == 0) {
            i_ += n;
            return true;
        }
        return false;
    }
    double call()
    {
        if (!eat('('))
            fail();
        const double v = expr();
        if (!eat(')'))
            fail();
        return v;
    }
    [[noreturn]] void fail() const { throw ConfigError("cannot parse number '" + s_ + "'"); }

    double expr()
    {
        double v = term();
        for (;;) {
            if (eat('+'))
                v += term();
            else if (eat('-'))
                v -= term();
            else
                return v;
        }
    }
    double term()
    {
        double v = factor();
        for (;;) {
            if (eat('*'))
                v *= factor();
            else if (eat('/'))
                v /= factor();
            else
                return v;
        }
    }
    double factor()
    {
        if (eat('-'))
            return -factor();
        if (eat('+'))
            return factor();
        if (eat('(')) {
            const double v = expr();
            if (!eat(')'))
                fail();
            return v;
        }
        if (word("pi"))
            return pi;
        if (word("sqrt"))
            return std::sqrt(call());
        if (word("atan"))
            return std::atan(call());
        skip();
        const char* begin = s_.c_str() + i_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin)
            fail();
        i_ += static_cast<std::size_t>(end - begin);
        if (word("pi"))  // "0.25pi"
            return v * pi;
        return v;
    }

    const std::string& s_;
    std::size_t i_ = 0;
};

int parse_int(const std::string& s)
{
    const double v = parse_number(s);
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw ConfigError("expected an integer, got '" + s + "'");
    return static_cast<int>(v);
}


std::optional<double> parse_optional(const std::string& s)
{
    if (s.empty() || s == "none")
        return std::nullopt;
    return parse_number(s);
}

std::string fmt_optional(const std::optional<double>& v) { return v ? fmt(*v) : "none"; }

const char* os_probe_name(OsProbe p)
{
    switch (p) {
    case OsProbe::Never: return "never";
    case OsProbe::NoStableFixedPoint: return "no-stable-fixed-point";
    case OsProbe::NpUnstable: return "np-unstable";
    }
    return "?";
}

OsProbe parse_os_probe(const std::string& s)
{
    for (auto p : {OsProbe::Never, OsProbe::NoStableFixedPoint, OsProbe::NpUnstable})
        if (s == os_probe_name(p))
            return p;
    throw ConfigError("unknown os_probe '" + s + "'");
}

std::string fmt_axis(const std::optional<AxisSpec>& a)
{
    if (!a)
        return "none";
    return std::string(to_string(a->kind)) + " " + fmt(a->lo) + " " + fmt(a->hi) + " " + std::to_string(a->n);
}

std::optional<AxisSpec> parse_axis(const std::string& s)
{
    if (s.empty() || s == "none")
        return std::nullopt;
    std::istringstream in(s);
    std::string name, lo, hi, n, extra;
    if (!(in >> name >> lo >> hi >> n) || (in >> extra))
        throw ConfigError("axis must read '<name> <lo> <hi> <count>', got '" + s + "'");
    return AxisSpec{axis_from_string(name), parse_number(lo), parse_number(hi), parse_int(n)};
}

struct Field {
    const char* key;
    const char* doc;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define VDICKE_DOUBLE(key, member, doc)                                                 \
    Field{key, doc, [](RunConfig& c, const std::string& v) { c.member = parse_number(v); }, \
          [](const RunConfig& c) { return fmt(c.member); }}
#define VDICKE_INT(key, member, doc)                                                 \
    Field{key, doc, [](RunConfig& c, const std::string& v) { c.member = parse_int(v); }, \
          [](const RunConfig& c) { return std::to_string(c.member); }}

// Axis slots are stored positionally in grid.axes; slot k exists only when all
// earlier slots are filled.
Field axis_field(int slot)
{
    static const char* keys[] = {"grid.axis1", "grid.axis2", "grid.axis3"};
    return Field{keys[slot], "grid axis '<name> <lo> <hi> <count>' or none",
                 [slot](RunConfig& c, const std::string& v) {
                     const auto a = parse_axis(v);
                     auto& axes = c.grid.axes;
                     if (!a) {
                         if (static_cast<int>(axes.size()) > slot)
                             axes.resize(slot);
                         return;
                     }
                     if (static_cast<int>(axes.size()) < slot)
                         throw ConfigError(std::string(keys[slot]) + " set before the preceding axis");
                     if (static_cast<int>(axes.size()) == slot)
                         axes.push_back(*a);
                     else
                         axes[slot] = *a;
                 },
                 [slot](const RunConfig& c) {
                     const auto& axes = c.grid.axes;
                     return fmt_axis(static_cast<int>(axes.size()) > slot ? std::optional(axes[slot]) : std::nullopt);
                 }};
}

const std::vector<Field>& fields()
{
    static const std::vector<Field> f = {
        Field{"run.name", "label copied into the manifest",
              [](RunConfig& c, const std::string& v) { c.name = v; }, [](const RunConfig& c) { return c.name; }},
        Field{"run.task", "sweep-closed | sweep-open | evolve | inverted-region | fidelity-scan | spectrum",
              [](RunConfig& c, const std::string& v) { c.task = task_from_string(v); },
              [](const RunConfig& c) { return std::string(to_string(c.task)); }},
        Field{"run.out", "output directory",
              [](RunConfig& c, const std::string& v) { c.out_dir = v; }, [](const RunConfig& c) { return c.out_dir; }},
        VDICKE_INT("run.workers", workers, "worker threads, 0 for all cores"),

        VDICKE_DOUBLE("model.omega", model.omega, "cavity frequency"),
        VDICKE_DOUBLE("model.omega0", model.omega0, "atomic level splitting"),
        VDICKE_DOUBLE("model.lambda1", model.lambda1, "coupling of the 0-1 transition"),
        VDICKE_DOUBLE("model.lambda2", model.lambda2, "coupling of the 0-2 transition"),
        VDICKE_DOUBLE("model.phi", model.phi, "co/counter-rotating mixing angle (rad)"),
        VDICKE_DOUBLE("model.kappa", model.kappa, "cavity loss rate"),
        VDICKE_DOUBLE("model.n_atoms", model.n_atoms, "atom number, used by the product fidelity map"),
        Field{"model.lambda_r", "radial coupling; with model.nu replaces lambda1 and lambda2",
              [](RunConfig& c, const std::string& v) { c.lambda_r = parse_optional(v); },
              [](const RunConfig& c) { return fmt_optional(c.lambda_r); }},
        Field{"model.nu", "coupling angle, tan(nu) = lambda2 / lambda1",
              [](RunConfig& c, const std::string& v) { c.nu = parse_optional(v); },
              [](const RunConfig& c) { return fmt_optional(c.nu); }},

        axis_field(0),
        axis_field(1),
        axis_field(2),
        Field{"grid.ratio", "fixed lambda2 / lambda1 or none",
              [](RunConfig& c, const std::string& v) { c.grid.ratio = parse_optional(v); },
              [](const RunConfig& c) { return fmt_optional(c.grid.ratio); }},

        VDICKE_DOUBLE("solver.spectral_tol", spectral_tol, "largest |Im| of a real excitation frequency"),
        VDICKE_DOUBLE("solver.stability_tol", open.stability_tol, "margin on min Re of the rapidities"),
        VDICKE_INT("solver.restarts", solver.restarts, "random restarts of the order-parameter solver"),
        Field{"solver.seed", "seed of the restart generator",
              [](RunConfig& c, const std::string& v) {
                  const double x = parse_number(v);
                  if (x < 0 || x != std::floor(x))
                      throw ConfigError("seed must be a non-negative integer");
                  c.solver.seed = static_cast<std::uint64_t>(x);
              },
              [](const RunConfig& c) { return std::to_string(c.solver.seed); }},
        Field{"solver.os_probe", "never | no-stable-fixed-point | np-unstable",
              [](RunConfig& c, const std::string& v) { c.open.os_probe = parse_os_probe(v); },
              [](const RunConfig& c) { return std::string(os_probe_name(c.open.os_probe)); }},
        VDICKE_DOUBLE("solver.os_t_max", open.os_t_max, "integration budget per point for limit-cycle detection"),

        VDICKE_DOUBLE("dynamics.rtol", open.integrator.rtol, "relative tolerance"),
        VDICKE_DOUBLE("dynamics.atol", open.integrator.atol, "absolute tolerance"),
        VDICKE_DOUBLE("dynamics.max_step", open.integrator.max_step, "largest step"),
        VDICKE_DOUBLE("dynamics.stride", open.integrator.stride, "sampling interval of recorded states"),
        VDICKE_DOUBLE("dynamics.transient", open.attractor.transient, "discarded time, negative for max(20/kappa, 1000)"),
        VDICKE_DOUBLE("dynamics.window", open.attractor.window, "length of each analysis window"),
        VDICKE_DOUBLE("dynamics.fp_tol", open.attractor.fp_tol, "relative spread of a fixed point"),
        VDICKE_DOUBLE("dynamics.amplitude_floor", open.attractor.amplitude_floor, "smallest relative cycle amplitude"),
        VDICKE_DOUBLE("dynamics.period_tol", open.attractor.period_tol, "relative period agreement between windows"),
        VDICKE_DOUBLE("dynamics.recurrence_tol", open.attractor.recurrence_tol, "peak-height mismatch one period apart, relative to amplitude"),
        VDICKE_DOUBLE("dynamics.t_end", t_end, "evolve: final time"),
        VDICKE_DOUBLE("dynamics.t_max", t_max, "fidelity-scan: settling horizon"),
        Field{"dynamics.initial", "normal | dark",
              [](RunConfig& c, const std::string& v) {
                  if (v == "normal")
                      c.initial = InitialState::Normal;
                  else if (v == "dark")
                      c.initial = InitialState::Dark;
                  else
                      throw ConfigError("initial must be normal or dark");
              },
              [](const RunConfig& c) { return std::string(c.initial == InitialState::Normal ? "normal" : "dark"); }},
        VDICKE_DOUBLE("dynamics.alpha0", alpha0, "seed cavity amplitude of the normal initial state"),
        Field{"dynamics.fidelity_map", "single-atom | product-n",
              [](RunConfig& c, const std::string& v) {
                  if (v == "single-atom")
                      c.fidelity_map = FidelityMap::SingleAtom;
                  else if (v == "product-n")
                      c.fidelity_map = FidelityMap::ProductN;
                  else
                      throw ConfigError("fidelity_map must be single-atom or product-n");
              },
              [](const RunConfig& c) {
                  return std::string(c.fidelity_map == FidelityMap::SingleAtom ? "single-atom" : "product-n");
              }},

        VDICKE_INT("inverted.n_theta", n_theta, "theta cells"),
        VDICKE_INT("inverted.n_n1", n_n1, "N1/N nodes"),
        VDICKE_DOUBLE("inverted.tol", inverted_tol, "stability margin in the inverted sector"),
    };
    return f;
}

#undef VDICKE_DOUBLE
#undef VDICKE_INT

const Field& find_field(const std::string& key)
{
    for (const auto& f : fields())
        if (key == f.key)
            return f;
    throw ConfigError("unknown key '" + key + "'");
}

void check(bool ok, const std::string& msg)
{
    if (!ok)
        throw ConfigError(msg);
}

} // namespace

const char* to_string(TaskKind t)
{
    for (const auto& n : kTasks)
        if (n.kind == t)
            return n.name;
    return "?";
}

TaskKind task_from_string(const std::string& s)
{
    for (const auto& n : kTasks)
        if (s == n.name)
            return n.kind;
    throw ConfigError("unknown task '" + s + "'");
}

double parse_number(const std::string& text)
{
    const double v = NumberParser(text).run();
    if (!std::isfinite(v))
        throw ConfigError("non-finite number '" + text + "'");
    return v;
}

ModelParams RunConfig::base_params() const
{
    ModelParams p = model;
    if (lambda_r || nu) {
        const double r = lambda_r ? *lambda_r : std::hypot(p.lambda1, p.lambda2);
        const double a = nu ? *nu : std::atan2(p.lambda2, p.lambda1);
        p.lambda1 = r * std::cos(a);
        p.lambda2 = r * std::sin(a);
    }
    return p;
}

SweepOptions RunConfig::sweep_options() const
{
    SweepOptions o;
    o.workers = workers;
    o.spectral_tol = spectral_tol;
    o.solver = solver;
    o.open = open;
    return o;
}

void RunConfig::validate() const
{
    check(schema_version == kSchemaVersion,
          "unsupported schema_version " + std::to_string(schema_version) + ", expected " +
              std::to_string(kSchemaVersion));
    check(!out_dir.empty(), "run.out must not be empty");
    check(workers >= 0, "run.workers must be >= 0");
    const ModelParams p = base_params();
    check(p.omega > 0 && p.omega0 > 0, "model.omega and model.omega0 must be positive");
    check(p.lambda1 >= 0 && p.lambda2 >= 0, "couplings must be non-negative");
    check(p.kappa >= 0, "model.kappa must be non-negative");
    check(p.n_atoms >= 1, "model.n_atoms must be >= 1");
    check(!lambda_r || *lambda_r >= 0, "model.lambda_r must be non-negative");
    grid.validate();
    check(!(nu && grid.ratio), "model.nu conflicts with grid.ratio");
    check(spectral_tol > 0 && open.stability_tol > 0, "solver tolerances must be positive");
    check(solver.restarts >= 0, "solver.restarts must be >= 0");
    check(open.os_t_max > 0, "solver.os_t_max must be positive");
    const auto& ic = open.integrator;
    check(ic.rtol > 0 && ic.atol > 0, "dynamics tolerances must be positive");
    check(ic.max_step > 0 && ic.stride > 0, "dynamics.max_step and dynamics.stride must be positive");
    check(open.attractor.window > 10 * ic.stride, "dynamics.window must span at least ten samples");
    check(t_end > 0 && t_max > 0, "dynamics.t_end and dynamics.t_max must be positive");
    check(n_theta >= 32 && n_n1 >= 32, "inverted grid must be at least 32 x 32");
    check(inverted_tol > 0, "inverted.tol must be positive");
    if (task == TaskKind::Evolve)
        check(grid.size() <= 1, "evolve runs a single trajectory; remove the grid axes");
}

RunConfig parse_config(const std::string& text, const std::string& origin)
{
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    bool have_version = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const std::string where = origin + ":" + std::to_string(lineno) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(where + "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            static const char* known[] = {"run", "model", "grid", "solver", "dynamics", "inverted"};
            if (std::find(std::begin(known), std::end(known), section) == std::end(known))
                throw ConfigError(where + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (section.empty() && key == "schema_version") {
                cfg.schema_version = parse_int(value);
                if (cfg.schema_version != kSchemaVersion)
                    throw ConfigError("unsupported schema_version " + value + ", expected " +
                                      std::to_string(kSchemaVersion));
                have_version = true;
                continue;
            }
            if (section.empty())
                throw ConfigError("key '" + key + "' outside a section");
            find_field(section + "." + key).set(cfg, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
    if (!have_version)
        throw ConfigError(origin + ": missing schema_version");
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

void apply_override(RunConfig& cfg, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    try {
        if (key == "schema_version")
            cfg.schema_version = parse_int(value);
        else
            find_field(key).set(cfg, value);
    } catch (const ConfigError& e) {
        throw ConfigError("--set " + key + ": " + e.what());
    }
}

std::vector<std::pair<std::string, std::string>> config_fields(const RunConfig& cfg)
{
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("schema_version", std::to_string(cfg.schema_version));
    for (const auto& f : fields())
        out.emplace_back(f.key, f.get(cfg));
    return out;
}

std::string serialize_config(const RunConfig& cfg)
{
    std::ostringstream out;
    out << "schema_version = " << cfg.schema_version << "\n";
    std::string section;
    for (const auto& f : fields()) {
        const std::string key = f.key;
        const auto dot = key.find('.');
        const std::string sec = key.substr(0, dot);
        if (sec != section) {
            out << "\n[" << sec << "]\n";
            section = sec;
        }
        out << key.substr(dot + 1) << " = " << f.get(cfg) << "\n";
    }
    return out.str();
}

std::string config_schema()
{
    const RunConfig defaults;
    std::ostringstream out;
    out << "schema_version = " << kSchemaVersion << "  (required)\n";
    for (const auto& f : fields())
        out << f.key << " = " << f.get(defaults) << "    # " << f.doc << "\n";
    return out.str();
}

} // namespace vdicke
