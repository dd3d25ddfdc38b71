#include "vdicke/app.hpp"
#include "vdicke/config.hpp"
#include "vdicke/errors.hpp"
#include "vdicke/version.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Common {
    std::string config;
    std::string recipe;
    std::string out;
    int workers = -1;
    std::vector<std::string> sets;
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--config", c.config, "config file")->check(CLI::ExistingFile);
    sub->add_option("--recipe", c.recipe, "bundled recipe to start from");
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--workers", c.workers, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
    sub->add_option("--set", c.sets, "override, section.key=value (repeatable)");
}

vdicke::RunConfig resolve(const Common& c, vdicke::TaskKind task)
{
    using vdicke::ConfigError;
    if (!c.config.empty() && !c.recipe.empty())
        throw ConfigError("--config and --recipe are exclusive");
    vdicke::RunConfig cfg;
    if (!c.recipe.empty()) {
        const auto& r = vdicke::find_recipe(c.recipe);
        cfg = vdicke::parse_config(r.config, "recipe " + r.name);
        if (cfg.task != task)
            throw ConfigError("recipe " + r.name + " is a " + vdicke::to_string(cfg.task) + " task");
    } else if (!c.config.empty()) {
        cfg = vdicke::load_config(c.config);
    }
    cfg.task = task;
    for (const auto& s : c.sets)
        vdicke::apply_override(cfg, s);
    if (!c.out.empty())
        cfg.out_dir = c.out;
    if (c.workers >= 0)
        cfg.workers = c.workers;
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mean-field phase diagrams and dynamics of the three-level V-configuration Dicke model"};
    app.set_version_flag("--version", std::string(vdicke::kVersion));
    app.require_subcommand(1);

    const std::pair<const char*, vdicke::TaskKind> tasks[] = {
        {"sweep-closed", vdicke::TaskKind::SweepClosed},
        {"sweep-open", vdicke::TaskKind::SweepOpen},
        {"evolve", vdicke::TaskKind::Evolve},
        {"inverted-region", vdicke::TaskKind::InvertedRegion},
        {"fidelity-scan", vdicke::TaskKind::FidelityScan},
        {"spectrum", vdicke::TaskKind::Spectrum},
    };
    const char* help[] = {
        "closed-system phase classification over a grid",
        "driven-dissipative phase classification over a grid",
        "integrate the mean-field equations of motion",
        "inverted-state stability region and its area",
        "dark-state fidelity of the settled steady state",
        "excitation spectra and rapidities over a grid",
    };

    Common common;
    std::vector<std::pair<CLI::App*, vdicke::TaskKind>> subs;
    for (std::size_t i = 0; i < std::size(tasks); ++i) {
        auto* sub = app.add_subcommand(tasks[i].first, help[i]);
        add_common(sub, common);
        subs.emplace_back(sub, tasks[i].second);
    }

    std::string show;
    bool schema = false;
    auto* rec = app.add_subcommand("recipes", "list bundled figure recipes");
    rec->add_option("--show", show, "print the config of one recipe");
    rec->add_flag("--schema", schema, "print every config key with its default");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (rec->parsed()) {
            if (schema) {
                std::cout << vdicke::config_schema();
            } else if (!show.empty()) {
                std::cout << vdicke::find_recipe(show).config;
            } else {
                for (const auto& r : vdicke::recipes())
                    std::cout << r.name << "\t" << r.description << "\n";
            }
            return 0;
        }
        for (const auto& [sub, task] : subs) {
            if (!sub->parsed())
                continue;
            const vdicke::RunConfig cfg = resolve(common, task);
            const vdicke::RunOutcome out = vdicke::execute(cfg);
            vdicke::write_outcome(cfg, out);
            std::cerr << vdicke::to_string(task) << ": " << out.points << " points, " << out.failures
                      << " failures, " << out.wall_seconds << " s -> " << cfg.out_dir << "\n";
            return out.exit_code();
        }
    } catch (const vdicke::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
