#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "crimegrid/config.hpp"
#include "crimegrid/errors.hpp"
#include "crimegrid/stages.hpp"

int main(int argc, char** argv) {
    CLI::App app{"crimegrid: spatio-temporal crime prediction pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    int jobs_override = 0;
    bool have_seed_override = false;
    std::uint64_t seed_override = 0;
    bool paper_mode_override = false;
    std::string out_override;

    app.add_option("--config", config_path, "path to the run configuration JSON")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--jobs", jobs_override, "parallel workers (overrides config)");
    app.add_option("--seed", seed_override, "master seed (overrides config)")
        ->each([&](const std::string&) { have_seed_override = true; });
    app.add_flag("--paper-mode", paper_mode_override,
                 "full-window features and global under-sampling, as in the source protocol");
    app.add_option("--out", out_override, "output directory (overrides config)");

    auto* synth = app.add_subcommand("synth", "generate the synthetic city files");
    auto* features = app.add_subcommand("features", "compute and export region features");
    auto* dataset = app.add_subcommand("dataset", "build the labeled grid and fold windows");
    auto* train = app.add_subcommand("train", "fit the model matrix and write test scores");
    auto* eval_cmd = app.add_subcommand("eval", "compute metrics from the trained scores");
    auto* report = app.add_subcommand("report", "render the result tables");
    auto* pipeline = app.add_subcommand("pipeline", "run every stage in order");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    crimegrid::RunConfig cfg;
    try {
        cfg = crimegrid::load_config(config_path);
    } catch (const crimegrid::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (jobs_override > 0) cfg.jobs = jobs_override;
    if (have_seed_override) {
        cfg.seed = seed_override;
        cfg.synth_config.seed = seed_override;
    }
    if (paper_mode_override) cfg.paper_mode = true;
    if (!out_override.empty()) {
        // keep default input paths anchored to the new output directory
        std::string old_synth = cfg.out_dir + "/synth/";
        auto rebase = [&](std::string& path) {
            if (path.rfind(old_synth, 0) == 0)
                path = out_override + "/synth/" + path.substr(old_synth.size());
        };
        rebase(cfg.inputs.regions);
        rebase(cfg.inputs.crimes);
        rebase(cfg.inputs.streetlights);
        rebase(cfg.inputs.pois);
        rebase(cfg.inputs.checkins);
        rebase(cfg.inputs.demographics);
        cfg.out_dir = out_override;
    }

    if (synth->parsed()) return crimegrid::cmd_synth(cfg);
    if (features->parsed()) return crimegrid::cmd_features(cfg);
    if (dataset->parsed()) return crimegrid::cmd_dataset(cfg);
    if (train->parsed()) return crimegrid::cmd_train(cfg);
    if (eval_cmd->parsed()) return crimegrid::cmd_eval(cfg);
    if (report->parsed()) return crimegrid::cmd_report(cfg);
    if (pipeline->parsed()) return crimegrid::cmd_pipeline(cfg);
    return 2;
}
