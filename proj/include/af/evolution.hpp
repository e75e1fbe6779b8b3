#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "af/config.hpp"
#include "af/engine.hpp"
#include "af/world.hpp"

namespace af {

struct Placement {
    char character = '?';
    Position pos;
    friend bool operator==(const Placement&, const Placement&) = default;
};

// What survives between generations: class definitions plus where each
// instance starts. Ids and node state are not kept.
struct Genome {
    std::vector<EntityDef> defs;
    std::vector<Placement> placements;
    friend bool operator==(const Genome&, const Genome&) = default;
};

struct MutationParams {
    double node_prob = 0.5;
    double edge_prob = 0.5;
    double instance_prob = 0.5;
};

// Each mutation loop runs at most this many rounds, so probability 1 still
// terminates.
inline constexpr int kMaxMutationRounds = 64;

Genome genome_from(const Fortress& fortress);

// Fresh fortress: ids from 0001 in placement order, every node at the root,
// empty visit sets.
Fortress instantiate(const Genome& genome, const SimConfig& config, std::uint64_t seed);

// Node operators never touch the root.
EntityDef delete_node(EntityDef def, const SimConfig& config, Rng& rng);
// Adds one unused action and an edge into it from a random existing node.
EntityDef add_node(EntityDef def, const SimConfig& config, Rng& rng);
EntityDef alter_node(EntityDef def, const SimConfig& config, Rng& rng);

EntityDef delete_edge(EntityDef def, const SimConfig& config, Rng& rng);
EntityDef add_edge(EntityDef def, const SimConfig& config, Rng& rng);
EntityDef alter_edge(EntityDef def, const SimConfig& config, Rng& rng);

// Three geometric loops (nodes, edges, instances), then every touched
// definition is pruned.
Genome mutate(const Genome& genome, const MutationParams& params, const SimConfig& config, Rng& rng);

// v / (u + 1) * t
double fitness_score(const Coverage& c);

struct Evaluation {
    double score = 0.0;
    Coverage coverage;
    std::size_t num_entities = 0;
    Termination termination = Termination::tick_limit;
    std::uint64_t seed = 0;  // generator state the simulation started from
};

// Instantiates the genome, simulates at most `ticks` ticks drawing from rng,
// and scores coverage over all definitions. `simulated`, when given,
// receives the final fortress.
Evaluation evaluate(const Genome& genome, const SimConfig& config, Rng& rng, long ticks,
                    Fortress* simulated = nullptr);

struct EvolutionRecord {
    int generation = 0;
    double best_fitness = 0.0;
    double child_fitness = 0.0;
    std::size_t num_entities = 0;
    Termination termination = Termination::tick_limit;
};

struct EvolutionResult {
    Genome best;
    Evaluation best_eval;
    std::vector<EvolutionRecord> records;
};

// (1+1) hillclimber. Generation 0 scores a freshly initialised genome; each
// later generation mutates the champion and keeps the child only on strict
// improvement.
EvolutionResult hillclimb(const SimConfig& config, const MutationParams& params, int generations, long ticks,
                          Rng& rng);

struct ClassCoverage {
    char character = '?';
    double node_pct = 0.0;
    std::optional<double> edge_pct;  // empty for a definition without edges
};

struct CoverageStats {
    std::vector<ClassCoverage> per_class;
    double mean_node_pct = 0.0;
    double mean_edge_pct = 0.0;  // over classes that have edges
};

CoverageStats coverage_stats(const std::vector<EntityDef>& defs, const std::vector<VisitSet>& visits);
inline CoverageStats coverage_stats(const Fortress& fortress) {
    return coverage_stats(fortress.defs(), fortress.visits());
}

std::string metrics_csv(const std::vector<EvolutionRecord>& records);

}  // namespace af
