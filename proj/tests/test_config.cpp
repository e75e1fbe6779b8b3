#include "doctest.h"

#include "af/config.hpp"
#include "oracles.hpp"

using namespace af;

namespace {

const std::string kMinimal = "seed: 3\ncharacters: a, b\n";

ConfigError error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected a ConfigError");
    return ConfigError("", 0, "");
}

}  // namespace

TEST_CASE("bundled paper config") {
    const auto c = load_config(std::string(AF_SOURCE_DIR) + "/configs/paper.cfg");
    CHECK(c.characters.size() == 15);
    CHECK(c.action_space.size() == 9);
    CHECK(c.edge_conditions.size() == 5);
    CHECK(c.width == 13);
    CHECK(c.height == 6);
    CHECK(c.pop_perc == 0.5);
    CHECK(c.fixed_defs.empty());
}

TEST_CASE("bundled zelda config") {
    const auto c = load_config(std::string(AF_SOURCE_DIR) + "/configs/zelda.cfg");
    CHECK(c.characters == std::vector<char>{'L', 'k', '$'});
    REQUIRE(c.population);
    CHECK(*c.population == std::vector<char>{'L', 'k'});
    REQUIRE(c.fixed_defs.size() == 3);
    const auto* korok = c.fixed_def('k');
    REQUIRE(korok);
    REQUIRE(korok->edges.size() == 1);
    CHECK(korok->edges[0].cond == EdgeCondition::next_to('L'));
    CHECK(korok->nodes[1] == ActionNode{ActionKind::transform, '$'});
}

TEST_CASE("defaults for omitted keys") {
    const auto c = parse_config(kMinimal);
    CHECK(c.seed == 3);
    CHECK(c.step_range == IntRange{1, 5});
    CHECK(c.prox_range == IntRange{1, 4});
    CHECK(c.inactive_limit == 10);
    CHECK(c.min_log == 5);
    CHECK(c.pop_perc == 0.5);
    CHECK(c.width == 13);
    CHECK(c.height == 6);
    CHECK(c.save_log);
    CHECK(c.log_file == "fortress.log");
    CHECK(c.action_space.size() == 9);
    CHECK(c.edge_conditions.size() == 5);
    CHECK_FALSE(c.population);
}

TEST_CASE("full key set with comments") {
    const auto c = parse_config(
        "# leading comment\n"
        "seed: 99   # trailing comment\n"
        "characters: x, y, z\n"
        "action_space: idle, move, take\n"
        "edge_conditions: none, touch\n"
        "step_range: (2, 3)\n"
        "prox_range: (1, 1)\n"
        "save_log: False\n"
        "log_file: out/run.log\n"
        "min_log: 0\n"
        "inactive_limit: 4\n"
        "pop_perc: 0.25\n"
        "width: 5\n"
        "height: 7\n"
        "population: x, x, z\n");
    CHECK(c.seed == 99);
    CHECK(c.characters == std::vector<char>{'x', 'y', 'z'});
    CHECK(c.action_space == std::vector<ActionKind>{ActionKind::idle, ActionKind::move, ActionKind::take});
    CHECK(c.edge_conditions == std::vector<ConditionKind>{ConditionKind::none, ConditionKind::touch});
    CHECK(c.step_range == IntRange{2, 3});
    CHECK_FALSE(c.save_log);
    CHECK(c.log_file == "out/run.log");
    CHECK(c.inactive_limit == 4);
    CHECK(c.pop_perc == 0.25);
    CHECK(c.width == 5);
    CHECK(c.height == 7);
    CHECK(*c.population == std::vector<char>{'x', 'x', 'z'});
}

TEST_CASE("seed any resolves to a number") {
    const auto c = parse_config("seed: any\ncharacters: a\n");
    const auto text = serialize_config(c);
    CHECK(text.rfind("seed: " + std::to_string(c.seed) + "\n", 0) == 0);
}

TEST_CASE("errors name key and line") {
    SUBCASE("pop_perc out of range") {
        const auto e = error_of(kMinimal + "pop_perc: 1.5\n");
        CHECK(e.key() == "pop_perc");
        CHECK(e.line() == 3);
    }
    SUBCASE("unknown key") {
        const auto e = error_of(kMinimal + "speed: 4\n");
        CHECK(e.key() == "speed");
        CHECK(std::string(e.what()).find("speed") != std::string::npos);
    }
    SUBCASE("duplicate key") {
        CHECK(error_of(kMinimal + "seed: 4\n").key() == "seed");
    }
    SUBCASE("bad ranges") {
        CHECK(error_of(kMinimal + "step_range: (4, 2)\n").key() == "step_range");
        CHECK(error_of(kMinimal + "prox_range: (0, 2)\n").key() == "prox_range");
        CHECK(error_of(kMinimal + "prox_range: 3\n").key() == "prox_range");
    }
    SUBCASE("action space must contain idle") {
        CHECK(error_of(kMinimal + "action_space: move, die\n").key() == "action_space");
    }
    SUBCASE("unknown action or condition") {
        CHECK(error_of(kMinimal + "action_space: idle, fly\n").key() == "action_space");
        CHECK(error_of(kMinimal + "edge_conditions: none, near\n").key() == "edge_conditions");
    }
    SUBCASE("bad characters") {
        CHECK(error_of("characters: a, #\n").key() == "characters");
        CHECK(error_of("characters: a, a\n").key() == "characters");
        CHECK(error_of("characters: ab\n").key() == "characters");
        CHECK(error_of("seed: 1\n").key() == "characters");
    }
    SUBCASE("population outside characters") {
        const auto e = error_of(kMinimal + "population: a, q\n");
        CHECK(e.key() == "population");
        CHECK(e.line() == 3);
    }
    SUBCASE("not a key/value line") {
        CHECK(error_of(kMinimal + "width 4\n").line() == 3);
    }
    SUBCASE("bad integer") {
        CHECK(error_of(kMinimal + "width: four\n").key() == "width");
        CHECK(error_of(kMinimal + "inactive_limit: 0\n").key() == "inactive_limit");
    }
    SUBCASE("definition for unknown class") {
        CHECK_THROWS_AS(parse_config(kMinimal + "ENTITY q\nNODES\n0: idle\nEDGES\nEND\n"), ConfigError);
    }
    SUBCASE("definition targeting unknown class") {
        CHECK_THROWS_AS(parse_config(kMinimal + "ENTITY a\nNODES\n0: idle\n1: take q\nEDGES\n0 -> 1 :: none\nEND\n"),
                        ConfigError);
    }
    SUBCASE("malformed definition reports its line") {
        const auto e = error_of(kMinimal + "ENTITY a\nNODES\n0: idle\n1: fly\nEDGES\nEND\n");
        CHECK(e.line() == 6);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_config("/nonexistent/af.cfg"), ConfigError);
    }
}

TEST_CASE("serialize and parse round trip") {
    SUBCASE("bundled configs") {
        for (const char* name : {"/configs/paper.cfg", "/configs/zelda.cfg"}) {
            const auto c = load_config(std::string(AF_SOURCE_DIR) + name);
            CHECK(parse_config(serialize_config(c)) == c);
        }
    }
    SUBCASE("random configs") {
        Rng rng(12);
        const std::string pool = "abcdefgXYZ@$%&*+!";
        for (int i = 0; i < 300; ++i) {
            SimConfig c;
            c.seed = rng.next_u64();
            for (char ch : pool)
                if (rng.next_below(2)) c.characters.push_back(ch);
            if (c.characters.empty()) c.characters.push_back('a');
            c.action_space = {ActionKind::idle};
            for (auto k : kAllActions)
                if (k != ActionKind::idle && rng.next_below(2)) c.action_space.push_back(k);
            c.edge_conditions.clear();
            for (auto k : kAllConditions)
                if (rng.next_below(2)) c.edge_conditions.push_back(k);
            if (c.edge_conditions.empty()) c.edge_conditions.push_back(ConditionKind::none);
            c.step_range = {1 + static_cast<int>(rng.next_below(3)), 4 + static_cast<int>(rng.next_below(3))};
            c.pop_perc = rng.next_unit();
            c.save_log = rng.next_below(2) == 0;
            c.width = 1 + static_cast<int>(rng.next_below(20));
            c.height = 1 + static_cast<int>(rng.next_below(20));
            if (rng.next_below(2)) c.population = std::vector<char>{c.characters.front()};
            if (rng.next_below(2)) c.fixed_defs.push_back(generate_fsm(c.characters.back(), c, rng));
            REQUIRE_NOTHROW(validate(c));
            REQUIRE(parse_config(serialize_config(c)) == c);
        }
    }
}
