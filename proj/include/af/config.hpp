#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "af/fsm.hpp"

namespace af {

struct IntRange {
    int min = 1;
    int max = 1;
    friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct SimConfig {
    std::uint64_t seed = 0;
    std::vector<char> characters;
    std::vector<ActionKind> action_space{std::begin(kAllActions), std::end(kAllActions)};
    std::vector<ConditionKind> edge_conditions{std::begin(kAllConditions), std::end(kAllConditions)};
    IntRange step_range{1, 5};
    IntRange prox_range{1, 4};
    bool save_log = true;
    std::string log_file = "fortress.log";
    int min_log = 5;
    int inactive_limit = 10;  // ticks
    double pop_perc = 0.5;
    int width = 13;
    int height = 6;

    // Explicit starting population, one instance per entry. When set, the
    // random one-per-class plus extra-copies initialisation is skipped.
    std::optional<std::vector<char>> population;

    // Hand-authored definitions; classes without one are generated.
    std::vector<EntityDef> fixed_defs;

    bool has_character(char c) const;
    const EntityDef* fixed_def(char c) const;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, std::size_t line, const std::string& what)
        : std::runtime_error(format(key, line, what)), key_(std::move(key)), line_(line) {}

    const std::string& key() const { return key_; }
    std::size_t line() const { return line_; }

private:
    static std::string format(const std::string& key, std::size_t line, const std::string& what) {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!key.empty()) out += "'" + key + "': ";
        return out + what;
    }

    std::string key_;
    std::size_t line_;
};

// Throws ConfigError. "seed: any" (or an omitted seed) is resolved here from
// std::random_device.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::string& path);

// Checks every invariant; throws ConfigError (line 0) on violation.
void validate(const SimConfig& config);

// Canonical text form; always writes a numeric seed.
std::string serialize_config(const SimConfig& config);

}  // namespace af
