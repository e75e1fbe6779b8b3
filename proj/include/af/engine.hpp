#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "af/world.hpp"

namespace af {

class EngineError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct TickReport {
    long tick = 0;
    std::size_t actions_logged = 0;
    std::vector<EntityId> spawned;
    std::vector<EntityId> removed;
    std::optional<Termination> terminated;
};

struct ActionOutcome {
    bool logged = false;
    std::optional<EntityId> spawned;
    std::optional<EntityId> removed;
};

// The probing instance never matches itself.
bool evaluate_condition(const EdgeCondition& cond, const EntityInstance& instance, const Fortress& fortress);

// Index into def.edges of the transition taken from the instance's current
// node: highest priority among satisfied edges, first listed on ties.
std::optional<std::size_t> select_transition(const EntityDef& def, const EntityInstance& instance,
                                             const Fortress& fortress);

ActionOutcome execute_action(const ActionNode& node, EntityId id, Fortress& fortress, const EngineParams& params,
                             Rng& rng);

// One tick: every instance alive at the start acts (ascending id), then every
// survivor takes at most one transition (ascending id), then termination is
// checked. Instances spawned during the tick sit out both phases.
TickReport step(Fortress& fortress, const EngineParams& params, Rng& rng);

using TickObserver = std::function<void(const Fortress&, const TickReport&)>;

// Steps until a termination predicate fires or max_ticks ticks have run.
Termination run(Fortress& fortress, const EngineParams& params, Rng& rng, long max_ticks,
                const TickObserver& observer = {});

inline TickReport step(Fortress& fortress, const SimConfig& config, Rng& rng) {
    return step(fortress, EngineParams::from(config), rng);
}
inline Termination run(Fortress& fortress, const SimConfig& config, Rng& rng, long max_ticks) {
    return run(fortress, EngineParams::from(config), rng, max_ticks);
}

}  // namespace af
