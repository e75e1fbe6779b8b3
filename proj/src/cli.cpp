#include "af/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "af/engine.hpp"

namespace af::cli {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

TickObserver make_renderer(const RenderOptions& opts, std::ostream& out) {
    if (!opts.enabled) return {};
    return [opts, &out](const Fortress& fortress, const TickReport&) {
        out << render(fortress, opts.verbose) << '\n' << std::flush;
        if (opts.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(opts.delay_ms));
    };
}

// Runs fn, mapping input errors to exit 1 and anything else to exit 2.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntimeError;
    }
}

struct TrialOutput {
    EvolutionResult result;
    std::string save;
    std::string log;
    CoverageStats stats;
};

TrialOutput run_trial(const SimConfig& base, const EvolveOptions& opts, int trial) {
    SimConfig config = base;
    config.seed = base.seed + static_cast<std::uint64_t>(trial);
    Rng rng(config.seed);
    TrialOutput out;
    out.result = hillclimb(config, opts.probs, opts.generations, opts.ticks, rng);

    Fortress best = instantiate(out.result.best, config, out.result.best_eval.seed);
    out.save = save_fortress(best, EngineParams::from(config));
    Rng replay(best.seed());
    const auto cause = run(best, EngineParams::from(config), replay, opts.ticks);
    out.log = format_log(best, cause);
    out.stats = coverage_stats(best);
    return out;
}

}  // namespace

std::string trial_csv_name(int trial) { return "trial_" + std::to_string(trial) + ".csv"; }
std::string trial_save_name(int trial) { return "trial_" + std::to_string(trial) + "_best.fortress"; }
std::string trial_log_name(int trial) { return "trial_" + std::to_string(trial) + "_best.log"; }

std::string render(const Fortress& fortress, bool verbose, std::size_t log_lines) {
    const int w = fortress.width();
    const int h = fortress.height();
    std::string out(static_cast<std::size_t>(w + 2), '#');
    out += '\n';
    for (int y = 0; y < h; ++y) {
        out += '#';
        for (int x = 0; x < w; ++x) {
            const auto& ids = fortress.occupants({x, y});
            out += ids.empty() ? ' ' : fortress.find(ids.back())->character;
        }
        out += "#\n";
    }
    out += std::string(static_cast<std::size_t>(w + 2), '#') + '\n';
    out += "t=" + std::to_string(fortress.tick()) + " entities=" + std::to_string(fortress.population()) + '\n';
    const auto& log = fortress.log();
    const std::size_t first = log.size() > log_lines ? log.size() - log_lines : 0;
    for (std::size_t i = first; i < log.size(); ++i) out += format_log_entry(log[i]) + '\n';
    if (verbose) {
        for (const auto& [id, inst] : fortress.instances()) {
            out += format_id(id) + "(" + inst.character + ") node " + std::to_string(inst.node) + ": " +
                   describe(fortress.def(inst.character).nodes[inst.node]) + '\n';
        }
    }
    return out;
}

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const SimConfig config = load_config(opts.config_path);
        fs::create_directories(opts.out_dir);
        write_file(opts.out_dir / kResolvedConfig, serialize_config(config));

        Rng rng(config.seed);
        Fortress fortress = init_fortress(config, rng);
        const EngineParams params = EngineParams::from(config);
        write_file(opts.out_dir / kInitialSave, save_fortress(fortress, params));

        const auto cause = run(fortress, params, rng, opts.ticks, make_renderer(opts.render, out));

        const fs::path log_path = opts.out_dir / fs::path(config.log_file).filename();
        const bool keep = config.save_log && fortress.tick() >= config.min_log;
        if (keep) write_file(log_path, format_log(fortress, cause));

        out << "seed " << config.seed << ": " << to_string(cause) << " at t=" << fortress.tick() << ", "
            << fortress.population() << " entities, " << fortress.log().size() << " logged actions\n";
        if (keep) {
            out << "log written to " << log_path.string() << '\n';
        } else {
            out << "log not saved (save_log=" << (config.save_log ? "true" : "false") << ", min_log=" << config.min_log
                << ")\n";
        }
        return kExitOk;
    });
}

int cmd_evolve(const EvolveOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (opts.generations < 1) throw ConfigError("generations", 0, "must be at least 1");
        if (opts.trials < 1) throw ConfigError("trials", 0, "must be at least 1");
        if (opts.ticks < 0) throw ConfigError("ticks", 0, "must be non-negative");
        for (double p : {opts.probs.node_prob, opts.probs.edge_prob, opts.probs.instance_prob})
            if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("probabilities", 0, "must lie in [0, 1]");

        const SimConfig config = load_config(opts.config_path);
        fs::create_directories(opts.out_dir);
        write_file(opts.out_dir / kResolvedConfig, serialize_config(config));

        std::vector<std::future<TrialOutput>> jobs;
        for (int t = 0; t < opts.trials; ++t)
            jobs.push_back(std::async(std::launch::async, run_trial, std::cref(config), std::cref(opts), t));

        for (int t = 0; t < opts.trials; ++t) {
            const TrialOutput trial = jobs[static_cast<std::size_t>(t)].get();
            write_file(opts.out_dir / trial_csv_name(t), metrics_csv(trial.result.records));
            write_file(opts.out_dir / trial_save_name(t), trial.save);
            write_file(opts.out_dir / trial_log_name(t), trial.log);
            const auto& recs = trial.result.records;
            char line[256];
            std::snprintf(line, sizeof line,
                          "trial %d (seed %llu): gen0 %.3f -> best %.3f; node coverage %.1f%%, edge coverage %.1f%%\n", t,
                          static_cast<unsigned long long>(config.seed + static_cast<std::uint64_t>(t)),
                          recs.front().best_fitness, recs.back().best_fitness, trial.stats.mean_node_pct,
                          trial.stats.mean_edge_pct);
            out << line;
        }
        return kExitOk;
    });
}

int cmd_replay(const ReplayOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto loaded = load_fortress(read_file(opts.save_path));
        fs::create_directories(opts.out_dir);
        Fortress& fortress = loaded.fortress;
        Rng rng(fortress.seed());
        const auto cause = run(fortress, loaded.params, rng, opts.ticks, make_renderer(opts.render, out));
        write_file(opts.out_dir / kReplayLog, format_log(fortress, cause));
        out << "replayed seed " << fortress.seed() << ": " << to_string(cause) << " at t=" << fortress.tick() << '\n';
        return kExitOk;
    });
}

int cmd_validate(const ValidateOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const SimConfig config = load_config(opts.config_path);
        out << serialize_config(config);
        return kExitOk;
    });
}

}  // namespace af::cli
