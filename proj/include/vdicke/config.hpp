#pragma once

#include "vdicke/dynamics.hpp"
#include "vdicke/model.hpp"
#include "vdicke/open_steady.hpp"
#include "vdicke/sweep.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vdicke {

inline constexpr int kSchemaVersion = 1;

enum class TaskKind { SweepClosed, SweepOpen, Evolve, InvertedRegion, FidelityScan, Spectrum };

const char* to_string(TaskKind t);
TaskKind task_from_string(const std::string& s);

enum class InitialState { Normal, Dark };

/// Everything a run needs. Serializes to the same key = value text it parses.
struct RunConfig {
    int schema_version = kSchemaVersion;
    std::string name = "run";
    TaskKind task = TaskKind::SweepClosed;
    std::string out_dir = "out";
    int workers = 0;

    ModelParams model{};
    std::optional<double> lambda_r;  // with nu, overrides lambda1 and lambda2
    std::optional<double> nu;
    GridSpec grid{};

    double spectral_tol = 1e-6;
    OrderSolveControls solver{};
    OpenClassifyControls open{};  // also holds the integrator and attractor controls

    double t_end = 1000.0;        // evolve
    double t_max = 1e5;           // fidelity-scan settling horizon
    InitialState initial = InitialState::Normal;
    double alpha0 = 0.01;
    FidelityMap fidelity_map = FidelityMap::SingleAtom;

    int n_theta = 256;
    int n_n1 = 256;
    double inverted_tol = 1e-9;

    /// Base parameters with the polar overrides applied.
    ModelParams base_params() const;
    SweepOptions sweep_options() const;
    /// Throws ConfigError with the offending field named.
    void validate() const;
};

/// Evaluates a numeric literal with optional arithmetic, pi, sqrt() and atan(), e.g. "7pi/16".
double parse_number(const std::string& text);

/// Parses INI-style text: "[section]" headers, "key = value" lines, '#' comments.
/// Throws ConfigError with the line number on any problem.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);

/// Applies "section.key=value" overrides in order.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Flattened (section.key, value) pairs in schema order.
std::vector<std::pair<std::string, std::string>> config_fields(const RunConfig& cfg);
std::string serialize_config(const RunConfig& cfg);

/// One line per key: name, default and meaning.
std::string config_schema();

} // namespace vdicke
