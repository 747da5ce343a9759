#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sfde/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Stochastic time-fractional diffusion: convergence studies and trajectories"};
    app.require_subcommand(1);

    sfde::cli::RunSpec spec;
    std::size_t threads = 0;

    auto add_run_options = [&](CLI::App* sub) {
        sub->add_option("--config", spec.config_path, "Key-value configuration file")->required();
        sub->add_option("--out", spec.output_dir, "Output directory")->capture_default_str();
        sub->add_option("--set", spec.overrides, "Override a configuration key (key=value), repeatable");
        sub->add_option("--threads", threads, "Worker threads (0 = all cores)");
    };

    auto* study = app.add_subcommand("study", "Run a convergence study, write table.csv and manifest.json");
    add_run_options(study);
    auto* trajectory = app.add_subcommand("trajectory", "Run one trajectory, write trajectory.bin and manifest.json");
    add_run_options(trajectory);
    auto* selftest = app.add_subcommand("selftest", "Run the built-in oracle suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (study->parsed()) spec.command = sfde::cli::Command::Study;
    else if (trajectory->parsed()) spec.command = sfde::cli::Command::Trajectory;
    else if (selftest->parsed()) spec.command = sfde::cli::Command::Selftest;

    for (auto* sub : {study, trajectory})
        if (sub->parsed() && sub->count("--threads") > 0) spec.threads = threads;

    return sfde::cli::run(spec, std::cout, std::cerr);
}
