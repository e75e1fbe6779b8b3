#include "doctest.h"

#include <cmath>

#include "af/evolution.hpp"
#include "oracles.hpp"

using namespace af;

namespace {

Genome random_genome(const SimConfig& config, Rng& rng) { return genome_from(init_fortress(config, rng)); }

EntityDef chain(char c, std::size_t moves) {
    EntityDef d;
    d.character = c;
    const ActionKind kinds[] = {ActionKind::move, ActionKind::die, ActionKind::clone};
    for (std::size_t i = 0; i < moves; ++i) {
        d.nodes.push_back({kinds[i], std::nullopt});
        d.edges.push_back({i, i + 1, EdgeCondition::none()});
    }
    return d;
}

}  // namespace

TEST_CASE("fitness score") {
    CHECK(fitness_score({1, 0, 1}) == doctest::Approx(oracle::eq1(1, 0, 1)));
    CHECK(fitness_score({1, 0, 1}) == doctest::Approx(1.0));
    CHECK(fitness_score({5, 2, 7}) == doctest::Approx(11.6667).epsilon(1e-4));
    CHECK(fitness_score({4, 0, 4}) == doctest::Approx(16.0));
    CHECK(fitness_score({0, 9, 9}) == 0.0);
}

TEST_CASE("mutation with zero probabilities is the identity") {
    const auto c = oracle::paper_config(3);
    Rng rng(c.seed);
    const auto g = random_genome(c, rng);
    for (int i = 0; i < 50; ++i) CHECK(mutate(g, {0.0, 0.0, 0.0}, c, rng) == g);
}

TEST_CASE("mutation with certain probabilities still terminates") {
    const auto c = oracle::paper_config(3);
    Rng rng(c.seed);
    const auto g = random_genome(c, rng);
    const auto child = mutate(g, {1.0, 1.0, 1.0}, c, rng);
    for (const auto& d : child.defs) CHECK_FALSE(check_invariants(d, true));
}

TEST_CASE("mutation preserves every invariant") {
    const auto c = oracle::paper_config(11);
    Rng rng(c.seed);
    auto g = random_genome(c, rng);
    int violations = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto child = mutate(g, {}, c, rng);
        REQUIRE(child.defs.size() == g.defs.size());
        for (std::size_t k = 0; k < child.defs.size(); ++k) {
            const auto& d = child.defs[k];
            if (check_invariants(d) || d.nodes[0].kind != ActionKind::idle) ++violations;
            // anything mutation changed has been pruned
            if (d != g.defs[k] && (check_invariants(d, true) || !oracle::all_reachable(d))) ++violations;
            if (!oracle::all_reachable(prune(d))) ++violations;
        }
        g = child;
        for (const auto& p : g.placements)
            if (p.pos.x < 0 || p.pos.y < 0 || p.pos.x >= c.width || p.pos.y >= c.height) ++violations;
        // reseed from time to time so the walk does not drift to one shape
        if (i % 500 == 499) g = random_genome(c, rng);
    }
    CHECK(violations == 0);
}

TEST_CASE("operators at their boundaries") {
    const auto c = oracle::paper_config(1);
    Rng rng(5);
    EntityDef root;
    root.character = '@';

    CHECK(delete_node(root, c, rng) == root);
    CHECK(alter_node(root, c, rng) == root);
    CHECK(delete_edge(root, c, rng) == root);
    CHECK(alter_edge(root, c, rng) == root);

    const auto one_edge = chain('@', 1);
    CHECK(delete_edge(one_edge, c, rng) == one_edge);

    SimConfig small = c;
    small.action_space = {ActionKind::idle, ActionKind::move};
    CHECK(add_node(chain('@', 1), small, rng) == chain('@', 1));  // every action already used

    auto complete = chain('@', 1);
    complete.edges.push_back({1, 0, EdgeCondition::none()});
    complete.sort_edges();
    CHECK(add_edge(complete, c, rng) == complete);
}

TEST_CASE("operators change what they say") {
    const auto c = oracle::paper_config(1);
    Rng rng(8);
    const auto d = chain('@', 2);

    const auto fewer = delete_node(d, c, rng);
    CHECK(fewer.nodes.size() == 2);
    CHECK_FALSE(check_invariants(fewer));

    const auto more = add_node(d, c, rng);
    CHECK(more.nodes.size() == 4);
    CHECK(more.edges.size() == 3);
    CHECK_FALSE(check_invariants(more, true));

    const auto altered = alter_node(d, c, rng);
    CHECK(altered.nodes.size() == 3);
    CHECK(altered.nodes != d.nodes);
    CHECK_FALSE(check_invariants(altered));

    CHECK(delete_edge(d, c, rng).edges.size() == 1);
    CHECK(add_edge(d, c, rng).edges.size() == 3);
    CHECK(alter_edge(d, c, rng).edges.size() == 2);
}

TEST_CASE("mutation prunes what it touches") {
    const auto c = oracle::paper_config(1);
    Rng rng(21);
    int pruned = 0;
    for (int i = 0; i < 300; ++i) {
        const auto g = random_genome(c, rng);
        const auto child = mutate(g, {1.0, 1.0, 0.0}, c, rng);
        for (const auto& d : child.defs) REQUIRE(oracle::all_reachable(d));
        for (std::size_t k = 0; k < g.defs.size(); ++k) pruned += child.defs[k].nodes.size() < g.defs[k].nodes.size();
    }
    CHECK(pruned > 0);
}

TEST_CASE("evaluation is deterministic and matches the trace") {
    const auto c = oracle::paper_config(13);
    Rng a(c.seed), b(c.seed);
    const auto ga = random_genome(c, a);
    const auto gb = random_genome(c, b);
    REQUIRE(ga == gb);
    Fortress fa(1, 1, {});
    const auto ea = evaluate(ga, c, a, 20, &fa);
    const auto eb = evaluate(gb, c, b, 20);
    CHECK(ea.score == eb.score);
    CHECK(ea.seed == eb.seed);
    CHECK(ea.num_entities == fa.population());
    const auto recount = oracle::coverage_from_trace(fa.defs(), fa.trace());
    CHECK(ea.score == doctest::Approx(oracle::eq1(recount.visited, recount.unvisited, recount.total)));

    // rerunning from the recorded seed reproduces the run
    Rng again(ea.seed);
    CHECK(evaluate(ga, c, again, 20).score == ea.score);
}

TEST_CASE("hillclimb") {
    const auto c = oracle::paper_config(2);
    SUBCASE("one generation is just the initial genome") {
        Rng rng(c.seed);
        const auto r = hillclimb(c, {}, 1, 20, rng);
        REQUIRE(r.records.size() == 1);
        CHECK(r.records[0].generation == 0);
        CHECK(r.records[0].best_fitness == r.best_eval.score);
    }
    SUBCASE("best fitness never drops") {
        Rng rng(c.seed);
        const auto r = hillclimb(c, {}, 200, 20, rng);
        REQUIRE(r.records.size() == 200);
        for (std::size_t i = 1; i < r.records.size(); ++i) {
            REQUIRE(r.records[i].best_fitness >= r.records[i - 1].best_fitness);
            REQUIRE(r.records[i].best_fitness >= r.records[i].child_fitness);
        }
        CHECK(r.best_eval.score == r.records.back().best_fitness);
    }
    SUBCASE("same seed, same trajectory") {
        Rng a(c.seed), b(c.seed);
        CHECK(metrics_csv(hillclimb(c, {}, 100, 20, a).records) == metrics_csv(hillclimb(c, {}, 100, 20, b).records));
    }
    SUBCASE("zero generations is rejected") {
        Rng rng(1);
        CHECK_THROWS_AS(hillclimb(c, {}, 0, 20, rng), std::invalid_argument);
    }
}

TEST_CASE("coverage statistics") {
    const auto d = chain('a', 2);
    SUBCASE("fully visited") {
        VisitSet v;
        v.nodes = {0, 1, 2};
        v.edges = {{0, 1}, {1, 2}};
        const auto s = coverage_stats({d}, {v});
        CHECK(s.mean_node_pct == doctest::Approx(100.0));
        CHECK(s.mean_edge_pct == doctest::Approx(100.0));
    }
    SUBCASE("never visited") {
        const auto s = coverage_stats({d}, {VisitSet{}});
        CHECK(s.mean_node_pct == doctest::Approx(0.0));
        CHECK(s.mean_edge_pct == doctest::Approx(0.0));
    }
    SUBCASE("edgeless classes are left out of the edge mean") {
        EntityDef root;
        root.character = 'b';
        VisitSet v;
        v.nodes = {0};
        v.edges = {{0, 1}};
        const auto s = coverage_stats({d, root}, {v, v});
        REQUIRE(s.per_class.size() == 2);
        CHECK_FALSE(s.per_class[1].edge_pct);
        CHECK(s.mean_edge_pct == doctest::Approx(50.0));
        CHECK(s.mean_node_pct == doctest::Approx((100.0 / 3.0 + 100.0) / 2.0));
    }
}

TEST_CASE("evolved definitions favour reproductive actions") {
    int growing = 0;
    int shrinking = 0;
    for (std::uint64_t s = 1; s <= 5; ++s) {
        const auto c = oracle::paper_config(s);
        Rng rng(c.seed);
        const auto r = hillclimb(c, {}, 300, 20, rng);
        for (const auto& d : r.best.defs)
            for (const auto& n : d.nodes) {
                if (n.kind == ActionKind::transform || n.kind == ActionKind::add || n.kind == ActionKind::clone)
                    ++growing;
                if (n.kind == ActionKind::die || n.kind == ActionKind::take) ++shrinking;
            }
    }
    MESSAGE("transform/add/clone nodes " << growing << ", die/take nodes " << shrinking);
    CHECK(growing > shrinking);
}

TEST_CASE("metrics csv") {
    const std::vector<EvolutionRecord> records = {
        {0, 1.5, 1.5, 3, Termination::tick_limit},
        {1, 2.0, 2.0, 0, Termination::extinction},
    };
    CHECK(metrics_csv(records) ==
          "generation,best_fitness,child_fitness,num_entities,termination\n"
          "0,1.500000,1.500000,3,tick_limit\n"
          "1,2.000000,2.000000,0,extinction\n");
}
