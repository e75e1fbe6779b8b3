#include "af/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace af {

namespace {

constexpr int kMaxDimension = 4096;

const char* const kKeys[] = {
    "seed",     "characters",     "action_space", "edge_conditions", "step_range",
    "prox_range", "save_log",     "log_file",     "min_log",         "inactive_limit",
    "pop_perc", "width",          "height",       "population",
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    if (trim(s).empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool valid_glyph(char c) { return c > ' ' && c <= '~' && c != '#'; }

// Per-key parsing with error context.
struct Field {
    std::string key;
    std::size_t line;
    std::string_view value;

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(key, line, what); }

    template <typename Int>
    Int integer() const {
        Int v{};
        const auto* begin = value.data();
        const auto* end = value.data() + value.size();
        auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc{} || ptr != end) fail("expected an integer, got '" + std::string(value) + "'");
        return v;
    }

    int bounded(int lo, int hi) const {
        const int v = integer<int>();
        if (v < lo || v > hi)
            fail("value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return v;
    }

    double real() const {
        std::string copy(value);
        std::istringstream in(copy);
        in.imbue(std::locale::classic());
        double v = 0;
        in >> v;
        if (!in || in.peek() != std::char_traits<char>::eof())
            fail("expected a number, got '" + copy + "'");
        return v;
    }

    bool boolean() const {
        if (value == "true" || value == "True") return true;
        if (value == "false" || value == "False") return false;
        fail("expected true or false, got '" + std::string(value) + "'");
    }

    std::vector<char> chars() const {
        std::vector<char> out;
        for (auto item : split_list(value)) {
            if (item.size() != 1) fail("'" + std::string(item) + "' is not a single character");
            out.push_back(item[0]);
        }
        return out;
    }

    IntRange range() const {
        std::string_view inner = value;
        if (inner.size() >= 2 && inner.front() == '(' && inner.back() == ')')
            inner = inner.substr(1, inner.size() - 2);
        const auto parts = split_list(inner);
        if (parts.size() != 2) fail("expected '(min, max)'");
        Field lo{key, line, parts[0]};
        Field hi{key, line, parts[1]};
        return {lo.integer<int>(), hi.integer<int>()};
    }
};

template <typename Kind, typename ParseFn>
std::vector<Kind> kinds(const Field& f, ParseFn parse, const char* what) {
    std::vector<Kind> out;
    for (auto item : split_list(f.value)) {
        auto k = parse(item);
        if (!k) f.fail("unknown " + std::string(what) + " '" + std::string(item) + "'");
        if (std::find(out.begin(), out.end(), *k) != out.end())
            f.fail("duplicate " + std::string(what) + " '" + std::string(item) + "'");
        out.push_back(*k);
    }
    return out;
}

std::uint64_t entropy_seed() {
    std::random_device device;
    return (static_cast<std::uint64_t>(device()) << 32) ^ device();
}

void check(const SimConfig& config, const std::map<std::string, std::size_t>& lines) {
    auto fail = [&](const std::string& key, const std::string& what) {
        const auto it = lines.find(key);
        throw ConfigError(key, it == lines.end() ? 0 : it->second, what);
    };

    if (config.characters.empty()) fail("characters", "at least one character is required");
    std::set<char> seen;
    for (char c : config.characters) {
        if (!valid_glyph(c)) fail("characters", std::string("'") + c + "' cannot be used as an entity glyph");
        if (!seen.insert(c).second) fail("characters", std::string("duplicate character '") + c + "'");
    }
    if (std::find(config.action_space.begin(), config.action_space.end(), ActionKind::idle) ==
        config.action_space.end())
        fail("action_space", "must contain idle");
    if (config.edge_conditions.empty()) fail("edge_conditions", "at least one condition is required");
    for (const auto& [key, r] : {std::pair{"step_range", config.step_range}, std::pair{"prox_range", config.prox_range}}) {
        if (r.min < 1) fail(key, "minimum must be at least 1");
        if (r.min > r.max) fail(key, "minimum exceeds maximum");
    }
    if (config.log_file.empty()) fail("log_file", "must not be empty");
    if (config.min_log < 0) fail("min_log", "must be non-negative");
    if (config.inactive_limit < 1) fail("inactive_limit", "must be at least 1");
    if (!(config.pop_perc >= 0.0 && config.pop_perc <= 1.0)) fail("pop_perc", "must lie in [0, 1]");
    if (config.width < 1 || config.width > kMaxDimension) fail("width", "out of range");
    if (config.height < 1 || config.height > kMaxDimension) fail("height", "out of range");
    if (config.population) {
        for (char c : *config.population)
            if (!config.has_character(c))
                fail("population", std::string("'") + c + "' is not in characters");
    }

    std::set<char> fixed;
    for (const auto& def : config.fixed_defs) {
        const std::string key = std::string("ENTITY ") + def.character;
        if (!config.has_character(def.character)) fail(key, "character is not in characters");
        if (!fixed.insert(def.character).second) fail(key, "defined twice");
        if (auto bad = check_invariants(def)) fail(key, *bad);
        for (const auto& node : def.nodes)
            if (node.target && !config.has_character(*node.target))
                fail(key, "node '" + describe(node) + "' targets an unknown character");
        for (const auto& e : def.edges)
            if (e.cond.target && !config.has_character(*e.cond.target))
                fail(key, "edge " + std::to_string(e.src) + " -> " + std::to_string(e.dst) +
                              " targets an unknown character");
    }
}

template <typename T, typename Fn>
std::string join(const std::vector<T>& items, Fn fn) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += fn(items[i]);
    }
    return out;
}

}  // namespace

bool SimConfig::has_character(char c) const {
    return std::find(characters.begin(), characters.end(), c) != characters.end();
}

const EntityDef* SimConfig::fixed_def(char c) const {
    for (const auto& def : fixed_defs)
        if (def.character == c) return &def;
    return nullptr;
}

SimConfig parse_config(std::string_view text) {
    const auto lines = split_lines(text);
    SimConfig config;
    std::map<std::string, std::size_t> key_lines;
    bool seed_given = false;

    std::size_t i = 0;
    for (; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        std::string_view line = trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;
        if (line.rfind("ENTITY", 0) == 0) break;
        for (std::size_t p = 1; p < line.size(); ++p)
            if (line[p] == '#' && (line[p - 1] == ' ' || line[p - 1] == '\t')) {
                line = trim(line.substr(0, p));
                break;
            }

        const auto colon = line.find(':');
        if (colon == std::string_view::npos) throw ConfigError("", line_no, "expected 'key: value'");
        const std::string key(trim(line.substr(0, colon)));
        const Field f{key, line_no, trim(line.substr(colon + 1))};
        if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) f.fail("unknown key");
        if (!key_lines.emplace(key, line_no).second) f.fail("duplicate key");

        if (key == "seed") {
            seed_given = true;
            config.seed = f.value == "any" ? entropy_seed() : f.integer<std::uint64_t>();
        } else if (key == "characters") {
            config.characters = f.chars();
        } else if (key == "action_space") {
            config.action_space = kinds<ActionKind>(f, parse_action_kind, "action");
        } else if (key == "edge_conditions") {
            config.edge_conditions = kinds<ConditionKind>(f, parse_condition_kind, "condition");
        } else if (key == "step_range") {
            config.step_range = f.range();
        } else if (key == "prox_range") {
            config.prox_range = f.range();
        } else if (key == "save_log") {
            config.save_log = f.boolean();
        } else if (key == "log_file") {
            config.log_file = std::string(f.value);
        } else if (key == "min_log") {
            config.min_log = f.bounded(0, 1 << 30);
        } else if (key == "inactive_limit") {
            config.inactive_limit = f.bounded(1, 1 << 30);
        } else if (key == "pop_perc") {
            config.pop_perc = f.real();
            if (!(config.pop_perc >= 0.0 && config.pop_perc <= 1.0)) f.fail("must lie in [0, 1]");
        } else if (key == "width") {
            config.width = f.bounded(1, kMaxDimension);
        } else if (key == "height") {
            config.height = f.bounded(1, kMaxDimension);
        } else if (key == "population") {
            config.population = f.chars();
        }
    }

    if (i < lines.size()) {
        try {
            config.fixed_defs = parse_fsm_blocks(lines, i, lines.size(), i + 1);
        } catch (const ParseError& e) {
            throw ConfigError("ENTITY", e.line(), e.what());
        }
    }
    if (!seed_given) config.seed = entropy_seed();
    check(config, key_lines);
    return config;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", 0, "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void validate(const SimConfig& config) { check(config, {}); }

std::string serialize_config(const SimConfig& config) {
    auto glyph = [](char c) { return std::string(1, c); };
    auto range = [](const IntRange& r) {
        return "(" + std::to_string(r.min) + ", " + std::to_string(r.max) + ")";
    };
    std::ostringstream pop;
    pop.imbue(std::locale::classic());
    pop.precision(17);
    pop << config.pop_perc;

    std::ostringstream out;
    out << "seed: " << config.seed << '\n'
        << "characters: " << join(config.characters, glyph) << '\n'
        << "action_space: " << join(config.action_space, [](ActionKind k) { return std::string(to_string(k)); }) << '\n'
        << "edge_conditions: " << join(config.edge_conditions, [](ConditionKind k) { return std::string(to_string(k)); }) << '\n'
        << "step_range: " << range(config.step_range) << '\n'
        << "prox_range: " << range(config.prox_range) << '\n'
        << "save_log: " << (config.save_log ? "true" : "false") << '\n'
        << "log_file: " << config.log_file << '\n'
        << "min_log: " << config.min_log << '\n'
        << "inactive_limit: " << config.inactive_limit << '\n'
        << "pop_perc: " << pop.str() << '\n'
        << "width: " << config.width << '\n'
        << "height: " << config.height << '\n';
    if (config.population) out << "population: " << join(*config.population, glyph) << '\n';
    for (const auto& def : config.fixed_defs) out << serialize_fsm(def);
    return out.str();
}

}  // namespace af
