#include "af/fsm.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "af/config.hpp"

namespace af {

namespace {

constexpr std::size_t kMaxGeneratedNodes = 8;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::optional<std::size_t> parse_index(std::string_view s) {
    if (s.empty() || s.size() > 9) return std::nullopt;
    std::size_t value = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        value = value * 10 + static_cast<std::size_t>(c - '0');
    }
    return value;
}

std::optional<int> parse_positive(std::string_view s) {
    auto v = parse_index(s);
    if (!v || *v == 0) return std::nullopt;
    return static_cast<int>(*v);
}

std::optional<char> single_char(std::string_view s) {
    if (s.size() != 1) return std::nullopt;
    return s[0];
}

std::string describe(const EdgeCondition& cond) {
    std::string out(to_string(cond.kind));
    switch (cond.kind) {
        case ConditionKind::none:
            break;
        case ConditionKind::step:
            out += " " + std::to_string(cond.interval);
            break;
        case ConditionKind::within:
            out += ' ';
            out += cond.target.value_or('?');
            out += " " + std::to_string(cond.distance);
            break;
        case ConditionKind::next_to:
        case ConditionKind::touch:
            out += ' ';
            out += cond.target.value_or('?');
            break;
    }
    return out;
}

}  // namespace

std::string_view to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::idle: return "idle";
        case ActionKind::move: return "move";
        case ActionKind::die: return "die";
        case ActionKind::clone: return "clone";
        case ActionKind::push: return "push";
        case ActionKind::take: return "take";
        case ActionKind::chase: return "chase";
        case ActionKind::add: return "add";
        case ActionKind::transform: return "transform";
    }
    return "?";
}

std::string_view to_string(ConditionKind kind) {
    switch (kind) {
        case ConditionKind::none: return "none";
        case ConditionKind::step: return "step";
        case ConditionKind::within: return "within";
        case ConditionKind::next_to: return "nextTo";
        case ConditionKind::touch: return "touch";
    }
    return "?";
}

std::optional<ActionKind> parse_action_kind(std::string_view text) {
    for (ActionKind k : kAllActions)
        if (to_string(k) == text) return k;
    return std::nullopt;
}

std::optional<ConditionKind> parse_condition_kind(std::string_view text) {
    for (ConditionKind k : kAllConditions)
        if (to_string(k) == text) return k;
    return std::nullopt;
}

std::string describe(const ActionNode& node) {
    std::string out(to_string(node.kind));
    if (node.target) {
        out += ' ';
        out += *node.target;
    }
    return out;
}

bool EntityDef::has_node(const ActionNode& node) const {
    return std::find(nodes.begin(), nodes.end(), node) != nodes.end();
}

bool EntityDef::has_edge(std::size_t src, std::size_t dst) const {
    return std::any_of(edges.begin(), edges.end(),
                       [&](const FsmEdge& e) { return e.src == src && e.dst == dst; });
}

void EntityDef::sort_edges() {
    std::sort(edges.begin(), edges.end(), [](const FsmEdge& a, const FsmEdge& b) {
        return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
    });
}

std::optional<std::string> check_invariants(const EntityDef& def, bool require_reachable) {
    const std::size_t n = def.nodes.size();
    if (n == 0) return "no nodes";
    if (def.nodes[0] != ActionNode{}) return "node 0 is not the idle root";
    for (std::size_t i = 0; i < n; ++i) {
        const auto& node = def.nodes[i];
        if (takes_target(node.kind) != node.target.has_value())
            return "node " + std::to_string(i) + " has a malformed target";
        for (std::size_t j = 0; j < i; ++j)
            if (def.nodes[j] == node) return "duplicate node " + describe(node);
    }
    if (def.edges.size() > n * (n - 1)) return "too many edges";
    for (std::size_t i = 0; i < def.edges.size(); ++i) {
        const auto& e = def.edges[i];
        const auto label = "edge " + std::to_string(e.src) + "->" + std::to_string(e.dst);
        if (e.src >= n || e.dst >= n) return label + " references a missing node";
        if (e.src == e.dst) return label + " is a self-loop";
        if (i > 0) {
            const auto& p = def.edges[i - 1];
            if (std::pair(p.src, p.dst) >= std::pair(e.src, e.dst))
                return label + " is duplicated or out of order";
        }
        const auto& c = e.cond;
        const bool wants_target = c.kind == ConditionKind::within ||
                                  c.kind == ConditionKind::next_to ||
                                  c.kind == ConditionKind::touch;
        if (wants_target != c.target.has_value()) return label + " has a malformed target";
        if ((c.kind == ConditionKind::step) != (c.interval >= 1) ||
            (c.kind != ConditionKind::step && c.interval != 0))
            return label + " has a malformed step interval";
        if ((c.kind == ConditionKind::within) != (c.distance >= 1) ||
            (c.kind != ConditionKind::within && c.distance != 0))
            return label + " has a malformed distance";
    }
    if (require_reachable) {
        std::vector<bool> seen(n, false);
        std::deque<std::size_t> queue{0};
        seen[0] = true;
        while (!queue.empty()) {
            const auto at = queue.front();
            queue.pop_front();
            for (const auto& e : def.edges)
                if (e.src == at && !seen[e.dst]) {
                    seen[e.dst] = true;
                    queue.push_back(e.dst);
                }
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!seen[i]) return "node " + std::to_string(i) + " is unreachable";
    }
    return std::nullopt;
}

std::vector<ActionNode> expanded_action_space(const SimConfig& config) {
    std::vector<ActionNode> out;
    out.push_back(ActionNode{});
    for (ActionKind kind : config.action_space) {
        if (kind == ActionKind::idle) continue;
        if (takes_target(kind)) {
            for (char c : config.characters) out.push_back({kind, c});
        } else {
            out.push_back({kind, std::nullopt});
        }
    }
    return out;
}

std::vector<ActionNode> unused_actions(const EntityDef& def, const SimConfig& config) {
    std::vector<ActionNode> out;
    for (auto& node : expanded_action_space(config))
        if (!def.has_node(node)) out.push_back(std::move(node));
    return out;
}

EdgeCondition random_condition(const SimConfig& config, Rng& rng) {
    const auto& kinds = config.edge_conditions;
    const auto& chars = config.characters;
    auto in_range = [&](const IntRange& r) {
        return r.min + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(r.max - r.min + 1)));
    };
    switch (kinds[rng.next_below(kinds.size())]) {
        case ConditionKind::none:
            return EdgeCondition::none();
        case ConditionKind::step:
            return EdgeCondition::step(in_range(config.step_range));
        case ConditionKind::within: {
            const char target = chars[rng.next_below(chars.size())];
            return EdgeCondition::within(target, in_range(config.prox_range));
        }
        case ConditionKind::next_to:
            return EdgeCondition::next_to(chars[rng.next_below(chars.size())]);
        case ConditionKind::touch:
            return EdgeCondition::touch(chars[rng.next_below(chars.size())]);
    }
    return EdgeCondition::none();
}

EntityDef generate_fsm(char character, const SimConfig& config, Rng& rng) {
    EntityDef def;
    def.character = character;

    auto candidates = expanded_action_space(config);
    const std::size_t space = candidates.size();
    candidates.erase(candidates.begin());

    const std::size_t node_count = 1 + rng.next_below(std::min(kMaxGeneratedNodes, space));
    for (std::size_t i = 0; i + 1 < node_count; ++i) {
        const std::size_t j = i + rng.next_below(candidates.size() - i);
        std::swap(candidates[i], candidates[j]);
        def.nodes.push_back(candidates[i]);
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t s = 0; s < node_count; ++s)
        for (std::size_t d = 0; d < node_count; ++d)
            if (s != d) pairs.emplace_back(s, d);

    const std::size_t edge_count = rng.next_below(pairs.size() + 1);
    for (std::size_t i = 0; i < edge_count; ++i) {
        const std::size_t j = i + rng.next_below(pairs.size() - i);
        std::swap(pairs[i], pairs[j]);
        def.edges.push_back({pairs[i].first, pairs[i].second, random_condition(config, rng)});
    }
    def.sort_edges();
    return def;
}

EntityDef prune(const EntityDef& def) {
    const std::size_t n = def.nodes.size();
    std::vector<bool> keep(n, false);
    std::vector<std::size_t> stack{0};
    keep[0] = true;
    while (!stack.empty()) {
        const auto at = stack.back();
        stack.pop_back();
        for (const auto& e : def.edges)
            if (e.src == at && e.dst < n && !keep[e.dst]) {
                keep[e.dst] = true;
                stack.push_back(e.dst);
            }
    }

    EntityDef out;
    out.character = def.character;
    out.nodes.clear();
    std::vector<std::size_t> remap(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!keep[i]) continue;
        remap[i] = out.nodes.size();
        out.nodes.push_back(def.nodes[i]);
    }
    for (const auto& e : def.edges)
        if (e.src < n && e.dst < n && keep[e.src] && keep[e.dst])
            out.edges.push_back({remap[e.src], remap[e.dst], e.cond});
    out.sort_edges();
    return out;
}

std::string serialize_fsm(const EntityDef& def) {
    std::ostringstream out;
    out << "ENTITY " << def.character << "\nNODES\n";
    for (std::size_t i = 0; i < def.nodes.size(); ++i) out << i << ": " << describe(def.nodes[i]) << '\n';
    out << "EDGES\n";
    auto edges = def.edges;
    std::sort(edges.begin(), edges.end(), [](const FsmEdge& a, const FsmEdge& b) {
        return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
    });
    for (const auto& e : edges) out << e.src << " -> " << e.dst << " :: " << describe(e.cond) << '\n';
    out << "END\n";
    return out.str();
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.emplace_back(line);
        start = end + 1;
    }
    return lines;
}

namespace {

ActionNode parse_node_line(std::string_view line, std::size_t expected_index, std::size_t line_no) {
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError(line_no, "expected '<index>: <action>'");
    const auto index = parse_index(trim(line.substr(0, colon)));
    if (!index) throw ParseError(line_no, "bad node index");
    if (*index != expected_index)
        throw ParseError(line_no, "node index " + std::to_string(*index) + " out of sequence");
    const auto parts = tokens(line.substr(colon + 1));
    if (parts.empty() || parts.size() > 2) throw ParseError(line_no, "expected '<action>[ <char>]'");
    const auto kind = parse_action_kind(parts[0]);
    if (!kind) throw ParseError(line_no, "unknown action '" + std::string(parts[0]) + "'");
    ActionNode node{*kind, std::nullopt};
    if (takes_target(*kind)) {
        if (parts.size() != 2) throw ParseError(line_no, "action '" + std::string(parts[0]) + "' needs a target character");
        node.target = single_char(parts[1]);
        if (!node.target) throw ParseError(line_no, "target must be a single character");
    } else if (parts.size() != 1) {
        throw ParseError(line_no, "action '" + std::string(parts[0]) + "' takes no parameter");
    }
    return node;
}

FsmEdge parse_edge_line(std::string_view line, std::size_t node_count, std::size_t line_no) {
    const auto parts = tokens(line);
    if (parts.size() < 5 || parts[1] != "->" || parts[3] != "::")
        throw ParseError(line_no, "expected '<src> -> <dst> :: <condition>'");
    const auto src = parse_index(parts[0]);
    const auto dst = parse_index(parts[2]);
    if (!src || !dst) throw ParseError(line_no, "bad edge index");
    if (*src >= node_count || *dst >= node_count) throw ParseError(line_no, "edge references a missing node");
    if (*src == *dst) throw ParseError(line_no, "self-loop edge");
    const auto kind = parse_condition_kind(parts[4]);
    if (!kind) throw ParseError(line_no, "unknown condition '" + std::string(parts[4]) + "'");

    const std::size_t argc = parts.size() - 5;
    auto need = [&](std::size_t n) {
        if (argc != n)
            throw ParseError(line_no, "condition '" + std::string(parts[4]) + "' expects " +
                                          std::to_string(n) + " argument(s)");
    };
    auto target = [&](std::string_view s) {
        auto c = single_char(s);
        if (!c) throw ParseError(line_no, "target must be a single character");
        return *c;
    };
    auto positive = [&](std::string_view s) {
        auto v = parse_positive(s);
        if (!v) throw ParseError(line_no, "expected a positive integer, got '" + std::string(s) + "'");
        return *v;
    };

    FsmEdge edge{*src, *dst, {}};
    switch (*kind) {
        case ConditionKind::none:
            need(0);
            break;
        case ConditionKind::step:
            need(1);
            edge.cond = EdgeCondition::step(positive(parts[5]));
            break;
        case ConditionKind::within:
            need(2);
            edge.cond = EdgeCondition::within(target(parts[5]), positive(parts[6]));
            break;
        case ConditionKind::next_to:
            need(1);
            edge.cond = EdgeCondition::next_to(target(parts[5]));
            break;
        case ConditionKind::touch:
            need(1);
            edge.cond = EdgeCondition::touch(target(parts[5]));
            break;
    }
    return edge;
}

}  // namespace

std::vector<EntityDef> parse_fsm_blocks(const std::vector<std::string>& lines, std::size_t begin,
                                        std::size_t end, std::size_t first_line_no) {
    enum class Section { outside, header, nodes, edges };
    std::vector<EntityDef> defs;
    Section section = Section::outside;
    EntityDef current;
    std::size_t block_line = 0;

    for (std::size_t i = begin; i < end; ++i) {
        const std::size_t line_no = first_line_no + (i - begin);
        const std::string_view line = trim(lines[i]);
        if (line.empty()) continue;

        switch (section) {
            case Section::outside: {
                const auto parts = tokens(line);
                if (parts.size() != 2 || parts[0] != "ENTITY" || parts[1].size() != 1)
                    throw ParseError(line_no, "expected 'ENTITY <char>'");
                current = EntityDef{};
                current.character = parts[1][0];
                current.nodes.clear();
                block_line = line_no;
                section = Section::header;
                break;
            }
            case Section::header:
                if (line != "NODES") throw ParseError(line_no, "expected 'NODES'");
                section = Section::nodes;
                break;
            case Section::nodes:
                if (line == "EDGES") {
                    if (current.nodes.empty()) throw ParseError(line_no, "definition has no nodes");
                    if (current.nodes[0] != ActionNode{}) throw ParseError(block_line, "node 0 must be idle");
                    section = Section::edges;
                } else {
                    auto node = parse_node_line(line, current.nodes.size(), line_no);
                    if (current.has_node(node))
                        throw ParseError(line_no, "duplicate node '" + describe(node) + "'");
                    current.nodes.push_back(std::move(node));
                }
                break;
            case Section::edges:
                if (line == "END") {
                    current.sort_edges();
                    defs.push_back(std::move(current));
                    section = Section::outside;
                } else {
                    auto edge = parse_edge_line(line, current.nodes.size(), line_no);
                    if (current.has_edge(edge.src, edge.dst))
                        throw ParseError(line_no, "duplicate edge " + std::to_string(edge.src) + " -> " +
                                                      std::to_string(edge.dst));
                    current.edges.push_back(std::move(edge));
                }
                break;
        }
    }
    if (section != Section::outside)
        throw ParseError(first_line_no + (end - begin), "unterminated ENTITY block (missing END)");
    return defs;
}

EntityDef parse_fsm(std::string_view text) {
    const auto lines = split_lines(text);
    auto defs = parse_fsm_blocks(lines, 0, lines.size(), 1);
    if (defs.size() != 1)
        throw ParseError(defs.empty() ? 1 : lines.size(), "expected exactly one ENTITY block");
    return std::move(defs.front());
}

}  // namespace af
