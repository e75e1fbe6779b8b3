#include "af/world.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace af {

std::string format_id(EntityId id) {
    char buf[16];
    std::snprintf(buf, sizeof buf, id > 0xffffu ? "%08x" : "%04x", static_cast<unsigned>(id));
    return buf;
}

std::optional<EntityId> parse_id(std::string_view text) {
    if (text.size() != 4 && text.size() != 8) return std::nullopt;
    EntityId v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, 16);
    if (ec != std::errc{} || ptr != text.data() + text.size() || v == 0) return std::nullopt;
    return v;
}

std::string_view to_string(Termination cause) {
    switch (cause) {
        case Termination::extinction: return "extinction";
        case Termination::overpopulation: return "overpopulation";
        case Termination::inactivity: return "inactivity";
        case Termination::tick_limit: return "tick_limit";
    }
    return "?";
}

std::string format_log_entry(const LogEntry& entry) {
    return "[t=" + std::to_string(entry.tick) + "] " + format_id(entry.id) + "(" + entry.character + ") " +
           entry.detail;
}

Fortress::Fortress(int width, int height, std::vector<EntityDef> defs, std::uint64_t seed)
    : width_(width), height_(height), seed_(seed), defs_(std::move(defs)) {
    if (width_ < 1 || height_ < 1) throw WorldError("fortress dimensions must be positive");
    for (std::size_t i = 0; i < defs_.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (defs_[i].character == defs_[j].character)
                throw WorldError(std::string("duplicate definition for '") + defs_[i].character + "'");
    cells_.resize(static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_));
    visits_.resize(defs_.size());
}

std::optional<std::size_t> Fortress::def_index(char character) const {
    for (std::size_t i = 0; i < defs_.size(); ++i)
        if (defs_[i].character == character) return i;
    return std::nullopt;
}

const EntityDef& Fortress::def(char character) const {
    const auto i = def_index(character);
    if (!i) throw WorldError(std::string("no definition for '") + character + "'");
    return defs_[*i];
}

const EntityInstance* Fortress::find(EntityId id) const {
    const auto it = instances_.find(id);
    return it == instances_.end() ? nullptr : &it->second;
}

EntityInstance& Fortress::get(EntityId id) {
    const auto it = instances_.find(id);
    if (it == instances_.end()) throw WorldError("unknown entity " + format_id(id));
    return it->second;
}

const std::vector<EntityId>& Fortress::occupants(Position p) const {
    static const std::vector<EntityId> empty;
    if (!interior(p)) return empty;
    return cells_[static_cast<std::size_t>(p.y * width_ + p.x)];
}

void Fortress::index_insert(EntityId id, Position p) {
    auto& ids = cell(p);
    ids.insert(std::upper_bound(ids.begin(), ids.end(), id), id);
}

void Fortress::index_erase(EntityId id, Position p) {
    auto& ids = cell(p);
    ids.erase(std::remove(ids.begin(), ids.end(), id), ids.end());
}

EntityId Fortress::spawn(char character, Position p) {
    if (!def_index(character)) throw WorldError(std::string("cannot spawn unknown class '") + character + "'");
    if (!interior(p))
        throw WorldError("spawn position (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") is outside the fortress");
    const EntityId id = next_id_++;
    instances_.emplace(id, EntityInstance{id, character, p, 0});
    index_insert(id, p);
    return id;
}

void Fortress::restore(const EntityInstance& instance) {
    const auto di = def_index(instance.character);
    if (!di) throw WorldError(std::string("cannot restore unknown class '") + instance.character + "'");
    if (!interior(instance.pos)) throw WorldError("restored instance lies outside the fortress");
    if (instance.node >= defs_[*di].nodes.size()) throw WorldError("restored instance has an invalid node");
    if (instance.id == 0 || instances_.count(instance.id)) throw WorldError("restored instance id is not unique");
    instances_.emplace(instance.id, instance);
    index_insert(instance.id, instance.pos);
    next_id_ = std::max(next_id_, instance.id + 1);
}

void Fortress::remove(EntityId id) {
    auto& inst = get(id);
    index_erase(id, inst.pos);
    instances_.erase(id);
}

void Fortress::move_to(EntityId id, Position p) {
    auto& inst = get(id);
    if (!interior(p)) throw WorldError("move target outside the fortress");
    index_erase(id, inst.pos);
    inst.pos = p;
    index_insert(id, p);
}

void Fortress::set_node(EntityId id, std::size_t node) {
    auto& inst = get(id);
    if (node >= def(inst.character).nodes.size()) throw WorldError("node index out of range");
    inst.node = node;
}

void Fortress::transform(EntityId id, char character) {
    auto& inst = get(id);
    if (!def_index(character)) throw WorldError(std::string("cannot transform into unknown class '") + character + "'");
    inst.character = character;
    inst.node = 0;
}

void Fortress::log_action(EntityId id, std::string detail) {
    const auto& inst = get(id);
    log_.push_back({tick_, id, inst.character, std::move(detail)});
    last_action_tick_ = tick_;
}

void Fortress::mark_executed(const EntityInstance& instance) {
    visits_[*def_index(instance.character)].nodes.insert(instance.node);
    trace_.push_back({TraceEvent::Kind::execute, tick_, instance.id, instance.character, instance.node, 0});
}

void Fortress::mark_traversed(const EntityInstance& instance, std::size_t src, std::size_t dst) {
    visits_[*def_index(instance.character)].edges.emplace(src, dst);
    trace_.push_back({TraceEvent::Kind::traverse, tick_, instance.id, instance.character, src, dst});
}

Coverage Fortress::coverage() const {
    Coverage c;
    for (std::size_t i = 0; i < defs_.size(); ++i) {
        c.total += static_cast<long>(defs_[i].size());
        c.visited += static_cast<long>(visits_[i].nodes.size() + visits_[i].edges.size());
    }
    c.unvisited = c.total - c.visited;
    return c;
}

std::optional<Termination> Fortress::terminated(int inactive_limit) const {
    if (instances_.empty()) return Termination::extinction;
    if (instances_.size() > static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_))
        return Termination::overpopulation;
    if (tick_ - last_action_tick_ >= inactive_limit) return Termination::inactivity;
    return std::nullopt;
}

std::optional<std::string> Fortress::check_consistency() const {
    std::size_t indexed = 0;
    for (const auto& ids : cells_) {
        if (!std::is_sorted(ids.begin(), ids.end())) return "tile index out of order";
        indexed += ids.size();
    }
    if (indexed != instances_.size()) return "position index and instance table differ in size";
    for (const auto& [id, inst] : instances_) {
        if (id != inst.id) return "instance key mismatch";
        if (!interior(inst.pos)) return "instance " + format_id(id) + " outside the interior";
        const auto& ids = occupants(inst.pos);
        if (!std::binary_search(ids.begin(), ids.end(), id)) return "instance " + format_id(id) + " missing from its tile";
        const auto di = def_index(inst.character);
        if (!di) return "instance " + format_id(id) + " has no definition";
        if (inst.node >= defs_[*di].nodes.size()) return "instance " + format_id(id) + " has an invalid node";
    }
    for (std::size_t i = 0; i < defs_.size(); ++i) {
        for (auto n : visits_[i].nodes)
            if (n >= defs_[i].nodes.size()) return "visited node out of range";
        for (const auto& [s, d] : visits_[i].edges)
            if (!defs_[i].has_edge(s, d)) return "visited edge does not exist";
    }
    return std::nullopt;
}

std::optional<Termination> terminated(const Fortress& fortress, int inactive_limit) {
    return fortress.terminated(inactive_limit);
}

Coverage coverage(const Fortress& fortress) { return fortress.coverage(); }

Fortress init_fortress(const SimConfig& config, Rng& rng) {
    if (config.characters.empty()) throw ConfigError("characters", 0, "at least one character is required");
    std::vector<EntityDef> defs;
    for (char c : config.characters) {
        if (const auto* fixed = config.fixed_def(c)) {
            defs.push_back(*fixed);
        } else {
            defs.push_back(generate_fsm(c, config, rng));
        }
    }
    Fortress fortress(config.width, config.height, std::move(defs));

    auto random_tile = [&] {
        const int x = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(config.width)));
        const int y = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(config.height)));
        return Position{x, y};
    };

    if (config.population) {
        for (char c : *config.population) fortress.spawn(c, random_tile());
    } else {
        for (char c : config.characters) {
            fortress.spawn(c, random_tile());
            for (int extra = 0; extra < kMaxExtraCopies && rng.next_unit() < config.pop_perc; ++extra)
                fortress.spawn(c, random_tile());
        }
    }
    fortress.set_seed(rng.state());
    return fortress;
}

std::string save_fortress(const Fortress& fortress, const EngineParams& params) {
    std::ostringstream pop;
    pop.imbue(std::locale::classic());
    pop.precision(17);
    pop << params.pop_perc;

    std::ostringstream out;
    out << "FORTRESS seed=" << fortress.seed() << " w=" << fortress.width() << " h=" << fortress.height()
        << " pop_perc=" << pop.str() << " inactive_limit=" << params.inactive_limit << '\n';
    for (const auto& def : fortress.defs()) out << serialize_fsm(def);
    out << "INSTANCES\n";
    for (const auto& [id, inst] : fortress.instances())
        out << inst.character << ' ' << format_id(id) << ' ' << inst.pos.x << ' ' << inst.pos.y << ' ' << inst.node
            << '\n';
    out << "END\n";
    return out.str();
}

namespace {

std::vector<std::string_view> words(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename T>
std::optional<T> number(std::string_view s) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<double> real(std::string_view s) {
    std::istringstream in{std::string(s)};
    in.imbue(std::locale::classic());
    double v = 0;
    in >> v;
    if (!in || in.peek() != std::char_traits<char>::eof()) return std::nullopt;
    return v;
}

}  // namespace

LoadedFortress load_fortress(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw ParseError(1, "empty fortress file");

    const auto header = words(lines[0]);
    if (header.empty() || header[0] != "FORTRESS") throw ParseError(1, "expected 'FORTRESS seed=<u64> w=<int> h=<int>'");
    std::optional<std::uint64_t> seed;
    std::optional<int> w, h;
    EngineParams params;
    for (std::size_t i = 1; i < header.size(); ++i) {
        const auto eq = header[i].find('=');
        if (eq == std::string_view::npos) throw ParseError(1, "malformed header field '" + std::string(header[i]) + "'");
        const auto key = header[i].substr(0, eq);
        const auto value = header[i].substr(eq + 1);
        bool ok = true;
        if (key == "seed") {
            seed = number<std::uint64_t>(value);
            ok = seed.has_value();
        } else if (key == "w") {
            w = number<int>(value);
            ok = w && *w >= 1;
        } else if (key == "h") {
            h = number<int>(value);
            ok = h && *h >= 1;
        } else if (key == "pop_perc") {
            const auto p = real(value);
            ok = p && *p >= 0.0 && *p <= 1.0;
            if (ok) params.pop_perc = *p;
        } else if (key == "inactive_limit") {
            const auto n = number<int>(value);
            ok = n && *n >= 1;
            if (ok) params.inactive_limit = *n;
        } else {
            throw ParseError(1, "unknown header field '" + std::string(key) + "'");
        }
        if (!ok) throw ParseError(1, "bad value for '" + std::string(key) + "'");
    }
    if (!seed || !w || !h) throw ParseError(1, "header needs seed, w and h");

    std::size_t inst_line = lines.size();
    for (std::size_t i = 1; i < lines.size(); ++i)
        if (lines[i] == "INSTANCES") {
            inst_line = i;
            break;
        }
    if (inst_line == lines.size()) throw ParseError(lines.size(), "missing INSTANCES section");

    auto defs = parse_fsm_blocks(lines, 1, inst_line, 2);
    for (std::size_t i = 0; i < defs.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (defs[i].character == defs[j].character)
                throw ParseError(1, std::string("duplicate definition for '") + defs[i].character + "'");
    for (const auto& def : defs)
        for (const auto& node : def.nodes)
            if ((node.kind == ActionKind::add || node.kind == ActionKind::transform) &&
                std::none_of(defs.begin(), defs.end(), [&](const EntityDef& d) { return d.character == *node.target; }))
                throw ParseError(1, std::string("class '") + def.character + "' targets undefined class '" +
                                        *node.target + "'");

    Fortress fortress(*w, *h, std::move(defs), *seed);
    bool ended = false;
    for (std::size_t i = inst_line + 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (lines[i].empty()) continue;
        if (ended) throw ParseError(line_no, "content after END");
        if (lines[i] == "END") {
            ended = true;
            continue;
        }
        const auto parts = words(lines[i]);
        if (parts.size() != 5 || parts[0].size() != 1)
            throw ParseError(line_no, "expected '<char> <id> <x> <y> <node>'");
        const auto id = parse_id(parts[1]);
        const auto x = number<int>(parts[2]);
        const auto y = number<int>(parts[3]);
        const auto node = number<std::size_t>(parts[4]);
        if (!id || !x || !y || !node) throw ParseError(line_no, "malformed instance line");
        try {
            fortress.restore({*id, parts[0][0], {*x, *y}, *node});
        } catch (const WorldError& e) {
            throw ParseError(line_no, e.what());
        }
    }
    if (!ended) throw ParseError(lines.size(), "missing END");
    return {std::move(fortress), params};
}

std::string format_log(const Fortress& fortress, Termination cause) {
    std::string out;
    for (const auto& entry : fortress.log()) out += format_log_entry(entry) + '\n';
    out += "TERMINATED " + std::string(to_string(cause)) + " t=" + std::to_string(fortress.tick()) + '\n';
    for (const auto& def : fortress.defs()) out += serialize_fsm(def);
    out += "SEED " + std::to_string(fortress.seed()) + '\n';
    return out;
}

}  // namespace af
