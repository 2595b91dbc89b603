#include <iostream>

#include <CLI11.hpp>

#include "cli/config.hpp"
#include "cli/runner.hpp"
#include "heatbv/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"heatbv: heat-kernel functionals on discrete metric measure spaces"};
    app.require_subcommand(1);

    std::string config_path, report_dir;
    auto* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config_path, "experiment config file")->required();
    auto* rep = app.add_subcommand("report", "summarize verdicts in a results directory");
    rep->add_option("dir", report_dir, "directory holding verdict.json files")->required();
    auto* vk = app.add_subcommand("validate-kernel", "run the kernel validation scenario");
    vk->add_option("config", config_path, "experiment config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            auto cfg = heatbv::cli::ExperimentConfig::from_file(config_path);
            return heatbv::cli::run_experiment(cfg, std::cout);
        }
        if (vk->parsed()) {
            auto cfg = heatbv::cli::ExperimentConfig::from_file(config_path);
            cfg.scenario = heatbv::cli::Scenario::ValidateKernel;
            return heatbv::cli::run_experiment(cfg, std::cout);
        }
        if (rep->parsed()) return heatbv::cli::report_directory(report_dir, std::cout);
    } catch (const heatbv::ConfigParse& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return heatbv::cli::kExitError;
    } catch (const heatbv::ResolutionGuardViolated& e) {
        std::cerr << "resolution guard: " << e.what() << '\n';
        return heatbv::cli::kExitError;
    } catch (const heatbv::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return heatbv::cli::kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return heatbv::cli::kExitError;
    }
    return heatbv::cli::kExitError;
}
