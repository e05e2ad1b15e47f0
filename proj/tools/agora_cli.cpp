#include "agora/config.hpp"
#include "agora/experiments.hpp"
#include "agora/io.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace agora;

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string preset = "baseline";
    std::string scale = "desk";
    int jobs = 1;
};

void add_common(CLI::App* cmd, Common& c, bool needs_preset_grid) {
    cmd->add_option("--config", c.config_path, "key = value configuration file applied over the scale preset");
    cmd->add_option("--seed", c.seed, "master seed (run k uses seed + k)");
    cmd->add_option("--out", c.out, "output directory")->required();
    cmd->add_option("--preset", c.preset, needs_preset_grid ? "scenario whose preset grid is swept" : "scenario kind")
        ->check(CLI::IsMember({"baseline", "lr-frac", "lr-global", "herd-best", "herd-worst", "noise"}));
    cmd->add_option("--scale", c.scale, "paper or desk population and horizon")
        ->check(CLI::IsMember({"paper", "desk"}));
    cmd->add_option("--jobs", c.jobs, "runs executed concurrently")->check(CLI::PositiveNumber);
}

SimConfig build_config(const Common& c) {
    SimConfig config = preset_config(scale_from_string(c.scale));
    config.scenario.kind = scenario_kind_from_string(c.preset);
    if (!c.config_path.empty()) {
        config = load_config_file(c.config_path, config);
    }
    if (c.seed) {
        config.master_seed = *c.seed;
    }
    return validate(config);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Agent-based stock market simulator with reinforcement-learning traders"};
    app.require_subcommand(1);

    Common run_opts;
    bool log_orders = false;
    auto* run = app.add_subcommand("run", "simulate S runs of one configuration");
    add_common(run, run_opts, false);
    run->add_flag("--log-orders", log_orders, "also write every submitted order to orders.csv");

    Common sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "simulate every point of a scenario's preset grid");
    add_common(sweep, sweep_opts, true);

    std::string analyze_dir;
    auto* analyze = app.add_subcommand("analyze", "rebuild figure CSVs from stored run outputs");
    analyze->add_option("dir,--out", analyze_dir, "run or sweep directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            experiments::RunArgs args{build_config(run_opts), run_opts.out, run_opts.jobs, log_orders};
            experiments::cmd_run(args, std::cout);
            return 0;
        }
        if (*sweep) {
            const auto base = build_config(sweep_opts);
            const auto plan = experiments::preset_plan(base.scenario.kind, base, sweep_opts.out);
            const int failures = experiments::cmd_sweep(plan, sweep_opts.jobs, std::cout);
            return failures == 0 ? 0 : 1;
        }
        if (*analyze) {
            return experiments::cmd_analyze(analyze_dir, std::cout) == 0 ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
