#include "af/evolution.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace af {

Genome genome_from(const Fortress& fortress) {
    Genome g;
    g.defs = fortress.defs();
    for (const auto& [id, inst] : fortress.instances()) g.placements.push_back({inst.character, inst.pos});
    return g;
}

Fortress instantiate(const Genome& genome, const SimConfig& config, std::uint64_t seed) {
    Fortress fortress(config.width, config.height, genome.defs, seed);
    for (const auto& p : genome.placements) fortress.spawn(p.character, p.pos);
    return fortress;
}

EntityDef delete_node(EntityDef def, const SimConfig&, Rng& rng) {
    const std::size_t n = def.nodes.size();
    if (n <= 1) return def;
    const std::size_t victim = 1 + rng.next_below(n - 1);
    def.nodes.erase(def.nodes.begin() + static_cast<std::ptrdiff_t>(victim));
    std::vector<FsmEdge> kept;
    for (auto e : def.edges) {
        if (e.src == victim || e.dst == victim) continue;
        if (e.src > victim) --e.src;
        if (e.dst > victim) --e.dst;
        kept.push_back(e);
    }
    def.edges = std::move(kept);
    def.sort_edges();
    return def;
}

EntityDef add_node(EntityDef def, const SimConfig& config, Rng& rng) {
    const auto unused = unused_actions(def, config);
    if (unused.empty()) return def;
    const std::size_t from = rng.next_below(def.nodes.size());
    def.nodes.push_back(unused[rng.next_below(unused.size())]);
    def.edges.push_back({from, def.nodes.size() - 1, random_condition(config, rng)});
    def.sort_edges();
    return def;
}

EntityDef alter_node(EntityDef def, const SimConfig& config, Rng& rng) {
    if (def.nodes.size() <= 1) return def;
    const auto unused = unused_actions(def, config);
    if (unused.empty()) return def;
    const std::size_t target = 1 + rng.next_below(def.nodes.size() - 1);
    def.nodes[target] = unused[rng.next_below(unused.size())];
    return def;
}

EntityDef delete_edge(EntityDef def, const SimConfig&, Rng& rng) {
    if (def.edges.size() <= 1) return def;
    def.edges.erase(def.edges.begin() + static_cast<std::ptrdiff_t>(rng.next_below(def.edges.size())));
    return def;
}

EntityDef add_edge(EntityDef def, const SimConfig& config, Rng& rng) {
    std::vector<std::pair<std::size_t, std::size_t>> open;
    for (std::size_t s = 0; s < def.nodes.size(); ++s)
        for (std::size_t d = 0; d < def.nodes.size(); ++d)
            if (s != d && !def.has_edge(s, d)) open.emplace_back(s, d);
    if (open.empty()) return def;
    const auto [src, dst] = open[rng.next_below(open.size())];
    def.edges.push_back({src, dst, random_condition(config, rng)});
    def.sort_edges();
    return def;
}

EntityDef alter_edge(EntityDef def, const SimConfig& config, Rng& rng) {
    if (def.edges.empty()) return def;
    auto& edge = def.edges[rng.next_below(def.edges.size())];
    edge.cond = random_condition(config, rng);
    return def;
}

Genome mutate(const Genome& genome, const MutationParams& params, const SimConfig& config, Rng& rng) {
    using Op = EntityDef (*)(EntityDef, const SimConfig&, Rng&);
    static constexpr Op kNodeOps[] = {delete_node, add_node, alter_node};
    static constexpr Op kEdgeOps[] = {delete_edge, add_edge, alter_edge};

    Genome g = genome;
    double node_r = rng.next_unit();
    double edge_r = rng.next_unit();
    double instance_r = rng.next_unit();
    std::set<std::size_t> touched;

    auto def_loop = [&](double& r, double prob, const Op (&ops)[3]) {
        for (int round = 0; round < kMaxMutationRounds && r < prob; ++round) {
            const auto op = rng.next_below(3);
            if (!g.defs.empty()) {
                const auto which = rng.next_below(g.defs.size());
                g.defs[which] = ops[op](std::move(g.defs[which]), config, rng);
                touched.insert(which);
            }
            r = rng.next_unit();
        }
    };
    def_loop(node_r, params.node_prob, kNodeOps);
    def_loop(edge_r, params.edge_prob, kEdgeOps);

    for (int round = 0; round < kMaxMutationRounds && instance_r < params.instance_prob; ++round) {
        if (rng.next_below(2) == 0) {
            if (!g.placements.empty())
                g.placements.erase(g.placements.begin() +
                                   static_cast<std::ptrdiff_t>(rng.next_below(g.placements.size())));
        } else if (!g.defs.empty()) {
            const char c = g.defs[rng.next_below(g.defs.size())].character;
            const int x = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(config.width)));
            const int y = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(config.height)));
            g.placements.push_back({c, {x, y}});
        }
        instance_r = rng.next_unit();
    }

    for (auto i : touched) g.defs[i] = prune(g.defs[i]);
    return g;
}

double fitness_score(const Coverage& c) {
    return static_cast<double>(c.visited) / static_cast<double>(c.unvisited + 1) * static_cast<double>(c.total);
}

Evaluation evaluate(const Genome& genome, const SimConfig& config, Rng& rng, long ticks, Fortress* simulated) {
    Evaluation ev;
    ev.seed = rng.state();
    Fortress fortress = instantiate(genome, config, ev.seed);
    ev.termination = run(fortress, EngineParams::from(config), rng, ticks);
    ev.coverage = fortress.coverage();
    ev.score = fitness_score(ev.coverage);
    ev.num_entities = fortress.population();
    if (simulated) *simulated = std::move(fortress);
    return ev;
}

EvolutionResult hillclimb(const SimConfig& config, const MutationParams& params, int generations, long ticks,
                          Rng& rng) {
    if (generations < 1) throw std::invalid_argument("hillclimb needs at least one generation");
    EvolutionResult result;
    result.best = genome_from(init_fortress(config, rng));
    result.best_eval = evaluate(result.best, config, rng, ticks);
    result.records.push_back({0, result.best_eval.score, result.best_eval.score, result.best_eval.num_entities,
                              result.best_eval.termination});

    for (int gen = 1; gen < generations; ++gen) {
        Genome child = mutate(result.best, params, config, rng);
        Evaluation ev = evaluate(child, config, rng, ticks);
        if (ev.score > result.best_eval.score) {
            result.best = std::move(child);
            result.best_eval = ev;
        }
        result.records.push_back({gen, result.best_eval.score, ev.score, ev.num_entities, ev.termination});
    }
    return result;
}

CoverageStats coverage_stats(const std::vector<EntityDef>& defs, const std::vector<VisitSet>& visits) {
    CoverageStats stats;
    double node_sum = 0.0;
    double edge_sum = 0.0;
    std::size_t with_edges = 0;
    for (std::size_t i = 0; i < defs.size(); ++i) {
        const auto& def = defs[i];
        const VisitSet empty;
        const VisitSet& seen = i < visits.size() ? visits[i] : empty;
        ClassCoverage c;
        c.character = def.character;
        c.node_pct = 100.0 * static_cast<double>(seen.nodes.size()) / static_cast<double>(def.nodes.size());
        node_sum += c.node_pct;
        if (!def.edges.empty()) {
            c.edge_pct = 100.0 * static_cast<double>(seen.edges.size()) / static_cast<double>(def.edges.size());
            edge_sum += *c.edge_pct;
            ++with_edges;
        }
        stats.per_class.push_back(c);
    }
    if (!defs.empty()) stats.mean_node_pct = node_sum / static_cast<double>(defs.size());
    if (with_edges) stats.mean_edge_pct = edge_sum / static_cast<double>(with_edges);
    return stats;
}

std::string metrics_csv(const std::vector<EvolutionRecord>& records) {
    std::string out = "generation,best_fitness,child_fitness,num_entities,termination\n";
    char buf[160];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%zu,", r.generation, r.best_fitness, r.child_fitness,
                      r.num_entities);
        out += buf;
        out += to_string(r.termination);
        out += '\n';
    }
    return out;
}

}  // namespace af
