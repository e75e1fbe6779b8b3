#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "af/config.hpp"
#include "af/fsm.hpp"
#include "af/rng.hpp"

namespace af {

using EntityId = std::uint32_t;

// Four lowercase hex digits ("0001"), widening to eight past 0xffff.
std::string format_id(EntityId id);
std::optional<EntityId> parse_id(std::string_view text);

enum class Termination { extinction, overpopulation, inactivity, tick_limit };
std::string_view to_string(Termination cause);

struct Position {
    int x = 0;
    int y = 0;
    friend bool operator==(const Position&, const Position&) = default;
};

inline int manhattan(Position a, Position b) {
    const int dx = a.x - b.x;
    const int dy = a.y - b.y;
    return (dx < 0 ? -dx : dx) + (dy < 0 ? -dy : dy);
}

struct EntityInstance {
    EntityId id = 0;
    char character = '?';
    Position pos;
    std::size_t node = 0;
};

struct LogEntry {
    long tick = 0;
    EntityId id = 0;
    char character = '?';
    std::string detail;
};

std::string format_log_entry(const LogEntry& entry);

// Raw record of what each instance did, kept alongside the human-readable
// log. Execute events carry the node in `node`; traverse events the edge.
struct TraceEvent {
    enum class Kind { execute, traverse };
    Kind kind = Kind::execute;
    long tick = 0;
    EntityId id = 0;
    char character = '?';
    std::size_t node = 0;
    std::size_t dst = 0;
};

struct VisitSet {
    std::set<std::size_t> nodes;
    std::set<std::pair<std::size_t, std::size_t>> edges;
};

struct Coverage {
    long visited = 0;
    long unvisited = 0;
    long total = 0;
};

// Engine rules that come from the configuration rather than the world.
struct EngineParams {
    double pop_perc = 0.5;
    int inactive_limit = 10;

    static EngineParams from(const SimConfig& config) { return {config.pop_perc, config.inactive_limit}; }
};

class WorldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The bordered grid world. Coordinates cover the interior only; the wall
// ring lies outside [0,width) x [0,height). Tiles hold any number of
// instances.
class Fortress {
public:
    Fortress(int width, int height, std::vector<EntityDef> defs, std::uint64_t seed = 0);

    int width() const { return width_; }
    int height() const { return height_; }
    bool interior(Position p) const { return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_; }

    // Generator state at tick 0; a run seeded with it is reproducible.
    std::uint64_t seed() const { return seed_; }
    void set_seed(std::uint64_t seed) { seed_ = seed; }

    const std::vector<EntityDef>& defs() const { return defs_; }
    std::optional<std::size_t> def_index(char character) const;
    const EntityDef& def(char character) const;

    const std::map<EntityId, EntityInstance>& instances() const { return instances_; }
    const EntityInstance* find(EntityId id) const;
    std::size_t population() const { return instances_.size(); }

    // Ids on a tile, ascending.
    const std::vector<EntityId>& occupants(Position p) const;

    EntityId spawn(char character, Position p);
    // Restores an instance with a known id (save files). Later spawns use ids
    // above every restored one.
    void restore(const EntityInstance& instance);
    void remove(EntityId id);
    void move_to(EntityId id, Position p);
    void set_node(EntityId id, std::size_t node);
    void transform(EntityId id, char character);

    long tick() const { return tick_; }
    long last_action_tick() const { return last_action_tick_; }
    void advance_tick() { ++tick_; }

    // Appends a log line for a state-changing action at the current tick.
    void log_action(EntityId id, std::string detail);
    const std::vector<LogEntry>& log() const { return log_; }

    void mark_executed(const EntityInstance& instance);
    void mark_traversed(const EntityInstance& instance, std::size_t src, std::size_t dst);
    const std::vector<VisitSet>& visits() const { return visits_; }
    const std::vector<TraceEvent>& trace() const { return trace_; }

    // v, u, t over every definition, instantiated or not.
    Coverage coverage() const;

    std::optional<Termination> terminated(int inactive_limit) const;

    // Empty when the instance table, position index and visit sets agree.
    std::optional<std::string> check_consistency() const;

private:
    std::vector<EntityId>& cell(Position p) { return cells_[static_cast<std::size_t>(p.y * width_ + p.x)]; }
    void index_insert(EntityId id, Position p);
    void index_erase(EntityId id, Position p);
    EntityInstance& get(EntityId id);

    int width_;
    int height_;
    std::uint64_t seed_;
    std::vector<EntityDef> defs_;
    std::map<EntityId, EntityInstance> instances_;
    std::vector<std::vector<EntityId>> cells_;
    std::vector<LogEntry> log_;
    std::vector<TraceEvent> trace_;
    std::vector<VisitSet> visits_;
    EntityId next_id_ = 1;
    long tick_ = 0;
    long last_action_tick_ = 0;
};

std::optional<Termination> terminated(const Fortress& fortress, int inactive_limit);
Coverage coverage(const Fortress& fortress);

// Builds every class definition (hand-authored ones from the config, the rest
// generated in character order), then the starting population. The
// fortress seed is the generator state once initialisation is done.
Fortress init_fortress(const SimConfig& config, Rng& rng);

// Upper bound on extra copies drawn per class during initialisation.
inline constexpr int kMaxExtraCopies = 64;

// Save format: header, definitions, instances. Loading resets the clock.
std::string save_fortress(const Fortress& fortress, const EngineParams& params);

struct LoadedFortress {
    Fortress fortress;
    EngineParams params;
};
LoadedFortress load_fortress(std::string_view text);

// Log file body: entries, the termination line, definitions, seed.
std::string format_log(const Fortress& fortress, Termination cause);

}  // namespace af
