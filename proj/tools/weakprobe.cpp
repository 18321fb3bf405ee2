#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "weakprobe/experiments.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

struct Cli {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
};

void add_override_flags(CLI::App* sub, Cli& cli) {
    sub->add_option("--config", cli.config_path, "flat key=value config file");
    // Every config key is also a flag of the same name; flags win.
    static const char* keys[] = {"g", "beta", "init", "n_runs", "duration",
                                 "E", "delta_t", "sigma", "delta_i",
                                 "bin_range_sigmas", "seed", "out", "workers",
                                 "duration_min", "duration_max",
                                 "duration_points"};
    for (const char* key : keys) {
        sub->add_option_function<std::string>(
            std::string("--") + key,
            [&cli, key](const std::string& v) {
                cli.overrides.emplace_back(key, v);
            });
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo simulator for a charge qubit continuously probed "
                 "by a quantum point contact"};
    app.require_subcommand(1);

    Cli cli;
    std::string experiment;
    const std::pair<const char*, const char*> subs[] = {
        {"fig2", "measurement-basis scatter vs coupling"},
        {"fig3", "mean fidelity vs measurement duration"},
        {"tomo", "stochastic-basis state tomography"},
        {"traj", "single-trajectory dump"}};
    for (const auto& [name, desc] : subs) {
        CLI::App* sub = app.add_subcommand(name, desc);
        add_override_flags(sub, cli);
        sub->callback([&experiment, name = name] { experiment = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        // bad flags and malformed command lines are configuration errors
        app.exit(e);
        return kExitConfigError;
    }

    try {
        weakprobe::ExperimentConfig cfg = weakprobe::default_config(experiment);
        if (!cli.config_path.empty())
            weakprobe::apply_config_file(cfg, cli.config_path);
        for (const auto& [key, value] : cli.overrides)
            weakprobe::apply_override(cfg, key, value);
        cfg.validate();
        weakprobe::run_and_write(cfg);
    } catch (const weakprobe::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const weakprobe::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumericalError;
    }
    return 0;
}
