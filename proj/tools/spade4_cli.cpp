// Command-line harness around the experiment runners. One config file (or a
// named preset) fully determines one experiment; per-run seeds derive from
// the master seed, so re-runs are byte-identical.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spade4/experiment.hpp"
#include "spade4/version.hpp"

namespace {

struct GlobalArgs {
    std::string config;
    std::string preset;
    std::string out;
    std::string data_dir;
    std::optional<std::int64_t> seed;
};

spade4::ExperimentConfig make_config(const GlobalArgs& args) {
    spade4::ExperimentConfig cfg;
    if (!args.config.empty()) {
        cfg = spade4::parse_config_file(args.config);
    } else if (!args.preset.empty()) {
        spade4::apply_preset(cfg, args.preset);
    } else {
        throw spade4::ValidationError("provide --config FILE or --preset NAME");
    }
    if (!args.preset.empty() && args.config.empty()) cfg.preset = args.preset;
    if (!args.out.empty()) cfg.out_dir = args.out;
    if (!args.data_dir.empty()) cfg.data_dir = args.data_dir;
    if (args.seed) cfg.master_seed = static_cast<std::uint64_t>(*args.seed);
    return cfg;
}

void add_global_options(CLI::App* cmd, GlobalArgs& args) {
    cmd->add_option("--config", args.config, "experiment config file (key = value)");
    cmd->add_option("--preset", args.preset, "built-in experiment preset");
    cmd->add_option("--out", args.out, "output directory (overrides config)");
    cmd->add_option("--data-dir", args.data_dir, "dataset directory (overrides config)");
    cmd->add_option("--seed", args.seed, "master seed (overrides config)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"epidemic forecasting from a single observed case series"};
    app.set_version_flag("--version", spade4::kVersion);
    app.require_subcommand(1);

    GlobalArgs args;
    int stability_runs = 0;
    std::vector<int> p_values;

    CLI::App* simulate = app.add_subcommand("simulate", "generate the synthetic observable");
    CLI::App* forecast = app.add_subcommand("forecast", "write forecasts per method and m");
    CLI::App* evaluate = app.add_subcommand("evaluate", "relative errors over the holdout");
    CLI::App* interval = app.add_subcommand("interval", "95% prediction band");
    CLI::App* stability = app.add_subcommand("stability", "forecast band over repeated bases");
    CLI::App* sweep = app.add_subcommand("embed-sweep", "errors across embedding dimensions");
    for (CLI::App* cmd : {simulate, forecast, evaluate, interval, stability, sweep})
        add_global_options(cmd, args);
    stability->add_option("--runs", stability_runs, "number of repeated fits");
    sweep->add_option("--p-values", p_values, "embedding dimensions to sweep")
        ->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        spade4::ExperimentConfig cfg = make_config(args);
        if (simulate->parsed()) {
            if (cfg.dataset.empty()) cfg.dataset = "synthetic";
            const auto path = spade4::run_simulate(cfg);
            std::cout << path.string() << '\n';
        } else if (forecast->parsed()) {
            for (const auto& path : spade4::run_forecast(cfg)) std::cout << path.string() << '\n';
        } else if (evaluate->parsed()) {
            std::cout << spade4::run_evaluate(cfg).string() << '\n';
        } else if (interval->parsed()) {
            std::cout << spade4::run_interval(cfg).string() << '\n';
        } else if (stability->parsed()) {
            const int runs = stability_runs > 0 ? stability_runs : cfg.stability_runs;
            for (const auto& path : spade4::run_stability(cfg, runs))
                std::cout << path.string() << '\n';
        } else if (sweep->parsed()) {
            const std::vector<int>& ps = p_values.empty() ? cfg.p_values : p_values;
            std::cout << spade4::run_embedding_sweep(cfg, ps).string() << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
