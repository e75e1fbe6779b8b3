#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "af/rng.hpp"

namespace af {

struct SimConfig;

enum class ActionKind { idle, move, die, clone, push, take, chase, add, transform };
enum class ConditionKind { none, step, within, next_to, touch };

inline constexpr ActionKind kAllActions[] = {
    ActionKind::idle, ActionKind::move,  ActionKind::die, ActionKind::clone,    ActionKind::push,
    ActionKind::take, ActionKind::chase, ActionKind::add, ActionKind::transform,
};
inline constexpr ConditionKind kAllConditions[] = {
    ConditionKind::none, ConditionKind::step, ConditionKind::within, ConditionKind::next_to,
    ConditionKind::touch,
};

std::string_view to_string(ActionKind kind);
std::string_view to_string(ConditionKind kind);
std::optional<ActionKind> parse_action_kind(std::string_view text);
std::optional<ConditionKind> parse_condition_kind(std::string_view text);

// take, chase, add and transform carry a target character.
constexpr bool takes_target(ActionKind kind) {
    return kind == ActionKind::take || kind == ActionKind::chase || kind == ActionKind::add ||
           kind == ActionKind::transform;
}

// Transition priority, lowest to highest: none < step < within < nextTo < touch.
constexpr int priority(ConditionKind kind) { return static_cast<int>(kind); }

struct ActionNode {
    ActionKind kind = ActionKind::idle;
    std::optional<char> target;

    friend bool operator==(const ActionNode&, const ActionNode&) = default;
};

std::string describe(const ActionNode& node);

struct EdgeCondition {
    ConditionKind kind = ConditionKind::none;
    int interval = 0;  // step
    std::optional<char> target;  // within, nextTo, touch
    int distance = 0;  // within

    int priority() const { return af::priority(kind); }

    static EdgeCondition none() { return {}; }
    static EdgeCondition step(int every) { return {ConditionKind::step, every, std::nullopt, 0}; }
    static EdgeCondition within(char c, int d) { return {ConditionKind::within, 0, c, d}; }
    static EdgeCondition next_to(char c) { return {ConditionKind::next_to, 0, c, 0}; }
    static EdgeCondition touch(char c) { return {ConditionKind::touch, 0, c, 0}; }

    friend bool operator==(const EdgeCondition&, const EdgeCondition&) = default;
};

struct FsmEdge {
    std::size_t src = 0;
    std::size_t dst = 0;
    EdgeCondition cond;

    friend bool operator==(const FsmEdge&, const FsmEdge&) = default;
};

// Per-character behaviour graph. Node 0 is the idle root. Edges are kept
// sorted by (src, dst); that order is also the tie-break among transitions
// of equal priority.
struct EntityDef {
    char character = '?';
    std::vector<ActionNode> nodes{ActionNode{}};
    std::vector<FsmEdge> edges;

    std::size_t size() const { return nodes.size() + edges.size(); }
    bool has_node(const ActionNode& node) const;
    bool has_edge(std::size_t src, std::size_t dst) const;
    void sort_edges();

    friend bool operator==(const EntityDef&, const EntityDef&) = default;
};

// Empty when every structural invariant holds, otherwise a description of
// the first violation found. Reachability is only checked with
// require_reachable since unpruned definitions may legitimately hold orphans.
std::optional<std::string> check_invariants(const EntityDef& def, bool require_reachable = false);

// Every (kind, target) node the configuration allows, parameterised kinds
// expanded over the character set, in configuration order. Idle comes first.
std::vector<ActionNode> expanded_action_space(const SimConfig& config);

// Nodes of the expanded space not yet present in def.
std::vector<ActionNode> unused_actions(const EntityDef& def, const SimConfig& config);

// Draws a condition kind from the configuration, then its parameters.
EdgeCondition random_condition(const SimConfig& config, Rng& rng);

EntityDef generate_fsm(char character, const SimConfig& config, Rng& rng);

// Keeps the nodes reachable from the root (in their original order) and the
// edges between survivors.
EntityDef prune(const EntityDef& def);

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

std::string serialize_fsm(const EntityDef& def);
EntityDef parse_fsm(std::string_view text);

// Parses consecutive ENTITY blocks from lines[begin, end). first_line_no is
// the 1-based number of lines[begin], used in error messages.
std::vector<EntityDef> parse_fsm_blocks(const std::vector<std::string>& lines, std::size_t begin,
                                        std::size_t end, std::size_t first_line_no);

std::vector<std::string> split_lines(std::string_view text);

}  // namespace af
