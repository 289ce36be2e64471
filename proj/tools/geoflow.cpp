#include <CLI11.hpp>
#include <iostream>

#include "geoflow/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"geoflow: periodic geometric-flow laboratory on space-form targets"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    bool check = false;

    CLI::App* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("config", config_path, "key = value config file")->required();
    run->add_option("--set", overrides, "override a key, e.g. --set rho=0.5")->take_all();
    run->add_flag("--check", check, "enforce the preset's acceptance thresholds");

    CLI::App* presets = app.add_subcommand("presets", "list presets and their defaults");

    CLI::App* validate = app.add_subcommand("validate", "parse a config and print it resolved");
    validate->add_option("config", config_path, "key = value config file")->required();
    validate->add_option("--set", overrides, "override a key")->take_all();

    CLI11_PARSE(app, argc, argv);

    try {
        if (presets->parsed()) {
            for (geoflow::Preset p : geoflow::all_presets()) {
                std::cout << geoflow::to_string(p) << "\n";
                for (const auto& [k, v] : geoflow::preset_defaults(p))
                    if (k != "preset") std::cout << "  " << k << " = " << v << "\n";
            }
            return geoflow::kExitOk;
        }

        geoflow::ExperimentConfig cfg = geoflow::load_experiment_config(config_path, overrides);

        if (validate->parsed()) {
            for (const auto& [k, v] : cfg.resolved()) std::cout << k << " = " << v << "\n";
            return geoflow::kExitOk;
        }
        return geoflow::run_experiment(cfg, check, std::cout);
    } catch (const geoflow::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return geoflow::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
