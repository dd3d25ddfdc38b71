#pragma once

#include "vdicke/config.hpp"
#include "vdicke/sweep.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace vdicke {

/// A named file produced by a task, held in memory until the run succeeds.
struct Artifact {
    std::string file;
    std::string content;
};

struct RunOutcome {
    std::vector<Artifact> artifacts;  // CSV outputs, manifest last
    std::size_t points = 0;
    std::size_t failures = 0;
    double wall_seconds = 0.0;

    int exit_code() const { return failures ? 3 : 0; }
};

/// Executes the configured task. Per-point failures are recorded in the rows and
/// counted; nothing is written to disk.
RunOutcome execute(const RunConfig& cfg);

/// Writes every artifact under cfg.out_dir, creating it if needed.
void write_outcome(const RunConfig& cfg, const RunOutcome& out);

std::string closed_csv(const GridSpec& grid, const std::vector<ClosedSweepRow>& rows);
std::string open_csv(const GridSpec& grid, const std::vector<OpenSweepRow>& rows);
std::string trajectory_csv(const Trajectory& traj, const ModelParams& p);

struct Recipe {
    std::string name;
    std::string description;
    std::string config;  // config text
};

const std::vector<Recipe>& recipes();
const Recipe& find_recipe(const std::string& name);

} // namespace vdicke
