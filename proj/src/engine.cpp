#include "af/engine.hpp"

#include <array>
#include <cstdlib>
#include <string>

namespace af {

namespace {

struct Direction {
    int dx;
    int dy;
    const char* name;
};

constexpr std::array<Direction, 4> kDirections{{
    {0, -1, "north"},
    {0, 1, "south"},
    {1, 0, "east"},
    {-1, 0, "west"},
}};

Position offset(Position p, const Direction& d) { return {p.x + d.dx, p.y + d.dy}; }

bool has_occupant(const Fortress& fortress, Position p, char character, EntityId self) {
    for (EntityId id : fortress.occupants(p))
        if (id != self && fortress.find(id)->character == character) return true;
    return false;
}

// Uniform orthogonal neighbour inside the walls, or the tile itself when it
// has none.
Position adjacent_tile(const Fortress& fortress, Position p, Rng& rng) {
    std::array<Position, 4> free{};
    std::size_t n = 0;
    for (const auto& d : kDirections)
        if (fortress.interior(offset(p, d))) free[n++] = offset(p, d);
    if (n == 0) return p;
    return free[rng.next_below(n)];
}

std::string tag(const Fortress& fortress, EntityId id) {
    return format_id(id) + "(" + fortress.find(id)->character + ")";
}

}  // namespace

bool evaluate_condition(const EdgeCondition& cond, const EntityInstance& instance, const Fortress& fortress) {
    switch (cond.kind) {
        case ConditionKind::none:
            return true;
        case ConditionKind::step:
            return cond.interval > 0 && fortress.tick() % cond.interval == 0;
        case ConditionKind::within:
            for (const auto& [id, other] : fortress.instances())
                if (id != instance.id && other.character == *cond.target &&
                    manhattan(other.pos, instance.pos) <= cond.distance)
                    return true;
            return false;
        case ConditionKind::next_to:
            for (const auto& d : kDirections)
                if (has_occupant(fortress, offset(instance.pos, d), *cond.target, instance.id)) return true;
            return false;
        case ConditionKind::touch:
            return has_occupant(fortress, instance.pos, *cond.target, instance.id);
    }
    return false;
}

std::optional<std::size_t> select_transition(const EntityDef& def, const EntityInstance& instance,
                                             const Fortress& fortress) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < def.edges.size(); ++i) {
        const auto& e = def.edges[i];
        if (e.src != instance.node) continue;
        if (best && def.edges[*best].cond.priority() >= e.cond.priority()) continue;
        if (evaluate_condition(e.cond, instance, fortress)) best = i;
    }
    return best;
}

ActionOutcome execute_action(const ActionNode& node, EntityId id, Fortress& fortress, const EngineParams& params,
                             Rng& rng) {
    ActionOutcome out;
    const EntityInstance self = *fortress.find(id);
    auto log = [&](std::string detail) {
        fortress.log_action(id, std::move(detail));
        out.logged = true;
    };

    switch (node.kind) {
        case ActionKind::idle:
            break;

        case ActionKind::move: {
            const auto& d = kDirections[rng.next_below(4)];
            const Position to = offset(self.pos, d);
            if (fortress.interior(to)) {
                fortress.move_to(id, to);
                log(std::string("move ") + d.name);
            }
            break;
        }

        case ActionKind::die:
            log("die");
            fortress.remove(id);
            out.removed = id;
            break;

        case ActionKind::clone:
            if (rng.next_unit() < params.pop_perc) {
                const EntityId child = fortress.spawn(self.character, adjacent_tile(fortress, self.pos, rng));
                out.spawned = child;
                log("clone " + format_id(child));
            }
            break;

        case ActionKind::push: {
            const auto& d = kDirections[rng.next_below(4)];
            const Position to = offset(self.pos, d);
            if (!fortress.interior(to)) break;
            const auto& occupants = fortress.occupants(to);
            if (occupants.empty()) {
                fortress.move_to(id, to);
                log(std::string("push ") + d.name);
                break;
            }
            const EntityId victim = occupants.front();
            const Position beyond = offset(to, d);
            if (!fortress.interior(beyond)) break;
            const std::string victim_tag = tag(fortress, victim);
            fortress.move_to(victim, beyond);
            fortress.move_to(id, to);
            log(std::string("push ") + d.name + " " + victim_tag);
            break;
        }

        case ActionKind::take:
            for (EntityId other : fortress.occupants(self.pos)) {
                if (other == id || fortress.find(other)->character != *node.target) continue;
                log("take " + tag(fortress, other));
                fortress.remove(other);
                out.removed = other;
                break;
            }
            break;

        case ActionKind::chase: {
            const EntityInstance* target = nullptr;
            int best = 0;
            for (const auto& [oid, other] : fortress.instances()) {
                if (oid == id || other.character != *node.target) continue;
                const int dist = manhattan(other.pos, self.pos);
                if (!target || dist < best) {
                    target = &other;
                    best = dist;
                }
            }
            if (!target) break;
            const int dx = target->pos.x - self.pos.x;
            const int dy = target->pos.y - self.pos.y;
            const Direction horizontal = dx > 0 ? kDirections[2] : kDirections[3];
            const Direction vertical = dy > 0 ? kDirections[1] : kDirections[0];
            const bool horizontal_first = std::abs(dx) >= std::abs(dy);
            const std::array<std::pair<Direction, int>, 2> order = {
                horizontal_first ? std::pair{horizontal, dx} : std::pair{vertical, dy},
                horizontal_first ? std::pair{vertical, dy} : std::pair{horizontal, dx},
            };
            for (const auto& [d, delta] : order) {
                if (delta == 0) continue;
                const Position to = offset(self.pos, d);
                if (!fortress.interior(to)) continue;
                fortress.move_to(id, to);
                log(std::string("chase ") + *node.target + " " + d.name);
                break;
            }
            break;
        }

        case ActionKind::add:
            if (rng.next_unit() < params.pop_perc) {
                const EntityId child = fortress.spawn(*node.target, adjacent_tile(fortress, self.pos, rng));
                out.spawned = child;
                log("add " + tag(fortress, child));
            }
            break;

        case ActionKind::transform:
            log(std::string("transform ") + *node.target);
            fortress.transform(id, *node.target);
            break;
    }
    return out;
}

TickReport step(Fortress& fortress, const EngineParams& params, Rng& rng) {
    if (const auto cause = fortress.terminated(params.inactive_limit))
        throw EngineError("cannot step a terminated fortress (" + std::string(to_string(*cause)) + ")");

    fortress.advance_tick();
    TickReport report;
    report.tick = fortress.tick();

    std::vector<EntityId> alive;
    alive.reserve(fortress.population());
    for (const auto& [id, inst] : fortress.instances()) alive.push_back(id);

    for (EntityId id : alive) {
        const EntityInstance* inst = fortress.find(id);
        if (!inst) continue;
        fortress.mark_executed(*inst);
        const ActionNode node = fortress.def(inst->character).nodes[inst->node];
        const auto outcome = execute_action(node, id, fortress, params, rng);
        if (outcome.logged) ++report.actions_logged;
        if (outcome.spawned) report.spawned.push_back(*outcome.spawned);
        if (outcome.removed) report.removed.push_back(*outcome.removed);
    }

    for (EntityId id : alive) {
        const EntityInstance* inst = fortress.find(id);
        if (!inst) continue;
        const EntityDef& def = fortress.def(inst->character);
        if (const auto chosen = select_transition(def, *inst, fortress)) {
            const auto& edge = def.edges[*chosen];
            fortress.mark_traversed(*inst, edge.src, edge.dst);
            fortress.set_node(id, edge.dst);
        }
    }

    report.terminated = fortress.terminated(params.inactive_limit);
    return report;
}

Termination run(Fortress& fortress, const EngineParams& params, Rng& rng, long max_ticks,
                const TickObserver& observer) {
    for (long i = 0; i < max_ticks; ++i) {
        if (const auto cause = fortress.terminated(params.inactive_limit)) return *cause;
        const auto report = step(fortress, params, rng);
        if (observer) observer(fortress, report);
        if (report.terminated) return *report.terminated;
    }
    return Termination::tick_limit;
}

}  // namespace af
