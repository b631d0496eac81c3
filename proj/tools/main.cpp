// tdlr: command-line driver for the response/resonance laboratory.

#include <string>

#include "CLI11.hpp"
#include "tdlr/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"1D mean-field linear response and resonance toolbox"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    unsigned seed = 0;
    bool no_interaction = false;
    double delta = 1.0;
    app.add_option("--config", config_path, "configuration file (INI sections)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "seed for randomized checks");
    app.add_flag("--no-interaction", no_interaction, "zero the coupling operator");
    app.add_option("--delta", delta, "coupling scale for spectrum runs");

    // allow the shared flags before or after the subcommand
    app.fallthrough();
    for (const char* name : {"scf", "check", "spectrum", "kick", "resonance"})
        app.add_subcommand(name)->fallthrough();

    CLI11_PARSE(app, argc, argv);

    tdlr::Config cfg;
    try {
        if (!config_path.empty()) cfg = tdlr::Config::from_file(config_path);
    } catch (const tdlr::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    tdlr::RunOptions opts;
    opts.command = app.get_subcommands().front()->get_name();
    opts.out_dir = out_dir;
    opts.seed = seed;
    opts.no_interaction = no_interaction;
    opts.delta = delta;
    return tdlr::run(cfg, opts);
}
