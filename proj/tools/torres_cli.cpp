#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>

#include "torres/experiments.hpp"
#include "torres/version.hpp"

namespace {

int run(const std::string& cfg_path,
        torres::RunOutcome (*op)(const torres::ExperimentConfig&)) {
    try {
        const torres::ExperimentConfig cfg = torres::load_config(cfg_path);
        const torres::RunOutcome out = op(cfg);
        for (const std::string& e : out.errors) std::cerr << "error: " << e << "\n";
        std::cout << out.summary << "\n";
        return out.exit_code;
    } catch (const torres::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"torres: torus resonances, viscous spectra and phase-space transforms"};
    app.set_version_flag("--version", std::string("torres ") + torres::kVersion);
    app.require_subcommand(1);

    std::string cfg_path;
    auto add = [&](const char* name, const char* desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("config", cfg_path, "TOML experiment config")->required();
        return sub;
    };
    CLI::App* res = add("resonances", "deformed-operator spectra over (theta, n); writes spectra.csv");
    CLI::App* sweep = add("viscosity-sweep",
                          "viscous spectra across nu with path tracking; writes paths.csv + figure.svg");
    CLI::App* fbi = add("fbi-check", "phase-space transform inversion checks; writes fbi_check.csv");
    CLI::App* esc = add("escape-check", "sampled escape-condition gate for the configured symbol");

    CLI11_PARSE(app, argc, argv);

    if (res->parsed()) return run(cfg_path, torres::run_resonances);
    if (sweep->parsed()) return run(cfg_path, torres::run_viscosity_sweep);
    if (fbi->parsed()) return run(cfg_path, torres::run_fbi_check);
    if (esc->parsed()) return run(cfg_path, torres::run_escape_check);
    return 2;
}
