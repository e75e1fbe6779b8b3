#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "af/cli.hpp"

int main(int argc, char** argv) {
    namespace cli = af::cli;

    const char* env_out = std::getenv("AF_OUT_DIR");
    const std::string default_out = env_out && *env_out ? env_out : ".";

    CLI::App app{"Finite-state-machine artificial life simulator and fortress evolver"};
    app.require_subcommand(1);

    cli::SimulateOptions sim;
    sim.out_dir = default_out;
    std::string sim_out = default_out;
    auto* simulate = app.add_subcommand("simulate", "Run one fortress to termination or the tick limit");
    simulate->add_option("--config", sim.config_path, "Configuration file")->required()->check(CLI::ExistingFile);
    simulate->add_option("--out", sim_out, "Output directory (default: $AF_OUT_DIR or .)");
    simulate->add_option("--ticks", sim.ticks, "Maximum ticks")->capture_default_str()->check(CLI::NonNegativeNumber);
    simulate->add_flag("--render", sim.render.enabled, "Draw the fortress after every tick");
    simulate->add_option("--delay-ms", sim.render.delay_ms, "Delay between rendered ticks")->capture_default_str();
    simulate->add_flag("--verbose", sim.render.verbose, "Show each entity's current node when rendering");

    cli::EvolveOptions evo;
    std::string evo_out = default_out;
    auto* evolve = app.add_subcommand("evolve", "Run independent hillclimbing trials");
    evolve->add_option("--config", evo.config_path, "Configuration file")->required()->check(CLI::ExistingFile);
    evolve->add_option("--out", evo_out, "Output directory (default: $AF_OUT_DIR or .)");
    evolve->add_option("--generations", evo.generations, "Generations per trial")->capture_default_str();
    evolve->add_option("--ticks", evo.ticks, "Ticks simulated per evaluation")->capture_default_str();
    evolve->add_option("--trials", evo.trials, "Independent trials (seed + trial index)")->capture_default_str();
    evolve->add_option("--node-prob", evo.probs.node_prob, "Node mutation probability")->capture_default_str();
    evolve->add_option("--edge-prob", evo.probs.edge_prob, "Edge mutation probability")->capture_default_str();
    evolve->add_option("--instance-prob", evo.probs.instance_prob, "Instance mutation probability")
        ->capture_default_str();

    cli::ReplayOptions rep;
    std::string rep_out = default_out;
    auto* replay = app.add_subcommand("replay", "Re-run a saved fortress with its embedded seed");
    replay->add_option("save", rep.save_path, "Fortress save file")->required();
    replay->add_option("--out", rep_out, "Output directory (default: $AF_OUT_DIR or .)");
    replay->add_option("--ticks", rep.ticks, "Maximum ticks")->capture_default_str()->check(CLI::NonNegativeNumber);
    replay->add_flag("--render", rep.render.enabled, "Draw the fortress after every tick");
    replay->add_option("--delay-ms", rep.render.delay_ms, "Delay between rendered ticks")->capture_default_str();
    replay->add_flag("--verbose", rep.render.verbose, "Show each entity's current node when rendering");

    cli::ValidateOptions val;
    auto* validate = app.add_subcommand("validate", "Parse a configuration and print it with defaults resolved");
    validate->add_option("--config", val.config_path, "Configuration file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kExitOk : cli::kExitConfigError;
    }

    if (*simulate) {
        sim.out_dir = sim_out;
        return cli::cmd_simulate(sim, std::cout, std::cerr);
    }
    if (*evolve) {
        evo.out_dir = evo_out;
        return cli::cmd_evolve(evo, std::cout, std::cerr);
    }
    if (*replay) {
        rep.out_dir = rep_out;
        return cli::cmd_replay(rep, std::cout, std::cerr);
    }
    return cli::cmd_validate(val, std::cout, std::cerr);
}
