#pragma once

// Test-only reference implementations. None of these call into the code
// path they are used to check.

#include <cstdlib>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "af/config.hpp"
#include "af/world.hpp"

namespace oracle {

inline std::vector<bool> reachable(const af::EntityDef& def) {
    std::vector<bool> seen(def.nodes.size(), false);
    if (def.nodes.empty()) return seen;
    std::deque<std::size_t> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
        const auto at = queue.front();
        queue.pop_front();
        for (const auto& e : def.edges)
            if (e.src == at && e.dst < seen.size() && !seen[e.dst]) {
                seen[e.dst] = true;
                queue.push_back(e.dst);
            }
    }
    return seen;
}

inline bool all_reachable(const af::EntityDef& def) {
    for (bool r : reachable(def))
        if (!r) return false;
    return true;
}

// Rebuilds class-level visit counts from the raw event trace.
inline af::Coverage coverage_from_trace(const std::vector<af::EntityDef>& defs,
                                        const std::vector<af::TraceEvent>& trace) {
    std::set<std::pair<char, std::size_t>> nodes;
    std::set<std::tuple<char, std::size_t, std::size_t>> edges;
    for (const auto& ev : trace) {
        if (ev.kind == af::TraceEvent::Kind::execute)
            nodes.emplace(ev.character, ev.node);
        else
            edges.emplace(ev.character, ev.node, ev.dst);
    }
    af::Coverage c;
    for (const auto& d : defs) c.total += static_cast<long>(d.nodes.size() + d.edges.size());
    c.visited = static_cast<long>(nodes.size() + edges.size());
    c.unvisited = c.total - c.visited;
    return c;
}

inline double eq1(long v, long u, long t) {
    return static_cast<double>(v) / static_cast<double>(u + 1) * static_cast<double>(t);
}

// Brute-force condition check straight from the definitions.
inline bool condition_holds(const af::EdgeCondition& cond, const af::EntityInstance& self, const af::Fortress& f) {
    using K = af::ConditionKind;
    if (cond.kind == K::none) return true;
    if (cond.kind == K::step) return f.tick() % cond.interval == 0;
    for (const auto& [id, other] : f.instances()) {
        if (id == self.id || other.character != *cond.target) continue;
        const int dist = std::abs(other.pos.x - self.pos.x) + std::abs(other.pos.y - self.pos.y);
        if (cond.kind == K::within && dist <= cond.distance) return true;
        if (cond.kind == K::next_to && dist == 1) return true;
        if (cond.kind == K::touch && dist == 0) return true;
    }
    return false;
}

inline std::string read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline af::SimConfig paper_config(std::uint64_t seed) {
    auto c = af::load_config(std::string(AF_SOURCE_DIR) + "/configs/paper.cfg");
    c.seed = seed;
    return c;
}

}  // namespace oracle
