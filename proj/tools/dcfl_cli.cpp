#include "dcfl/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Continual federated learning simulator with diffusion replay"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run one experiment and write rounds.csv / summary.csv");
    run->add_option("config", config_path, "key = value config file")->required();

    std::string sweep_config;
    std::string axis;
    std::string values;
    auto* sweep = app.add_subcommand("sweep", "Repeat a run over client counts or replay scales");
    sweep->add_option("config", sweep_config, "base config file")->required();
    sweep->add_option("--axis", axis, "clients or delta")->required();
    sweep->add_option("--values", values, "comma-separated values, e.g. 0.25,1,4")->required();

    dcfl::cli::SelftestOptions selftest_options;
    auto* selftest = app.add_subcommand("selftest", "Theorem check, gradient, forward-process and partition suites");
    selftest->add_flag("--corrupt-gradient", selftest_options.corrupt_gradient,
                       "perturb the classifier gradient (the run must fail)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : dcfl::cli::kExitConfigError;
    }

    if (*run) return dcfl::cli::cmd_run(config_path, std::cout, std::cerr);
    if (*sweep) return dcfl::cli::cmd_sweep(sweep_config, axis, values, std::cout, std::cerr);
    if (*selftest) return dcfl::cli::cmd_selftest(selftest_options, std::cout);
    return dcfl::cli::kExitConfigError;
}
