#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "af/evolution.hpp"
#include "af/world.hpp"

namespace af::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitRuntimeError = 2;

struct RenderOptions {
    bool enabled = false;
    int delay_ms = 100;
    bool verbose = false;
};

struct SimulateOptions {
    std::string config_path;
    std::filesystem::path out_dir = ".";
    long ticks = 100;
    RenderOptions render;
};

struct EvolveOptions {
    std::string config_path;
    std::filesystem::path out_dir = ".";
    int generations = 1000;
    long ticks = 20;
    int trials = 5;
    MutationParams probs;
};

struct ReplayOptions {
    std::string save_path;
    std::filesystem::path out_dir = ".";
    long ticks = 100;
    RenderOptions render;
};

struct ValidateOptions {
    std::string config_path;
};

// Output file names inside the output directory.
inline constexpr const char* kInitialSave = "initial.fortress";
inline constexpr const char* kResolvedConfig = "resolved.cfg";
inline constexpr const char* kReplayLog = "replay.log";
std::string trial_csv_name(int trial);
std::string trial_save_name(int trial);
std::string trial_log_name(int trial);

// Map and status panel: '#' walls, the highest id on each tile, a status
// line and the last log lines. Verbose adds each instance's current node.
std::string render(const Fortress& fortress, bool verbose, std::size_t log_lines = 5);

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_evolve(const EvolveOptions& opts, std::ostream& out, std::ostream& err);
int cmd_replay(const ReplayOptions& opts, std::ostream& out, std::ostream& err);
int cmd_validate(const ValidateOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace af::cli
