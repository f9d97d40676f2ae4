#include "speedroute/model.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <fstream>
#include <functional>
#include <sstream>
#include <tuple>

namespace speedroute {

namespace {

constexpr const char* kModelVersion = "speedroute-model/1";
constexpr const char* kRouteVersion = "speedroute-route/1";

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ValidationError(path + ": " + msg);
}

Rational parse_rational(const json& v, const std::string& path) {
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_number_float()) return rational_from_double(v.get<double>());
    if (v.is_string()) {
        try {
            return Rational::parse(v.get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail(path, e.what());
        }
    }
    fail(path, "expected a number or rational string");
}

std::string expect_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

long long expect_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<long long>();
}

std::vector<std::string> parse_string_list(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(expect_string(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<std::pair<std::string, long long>> parse_amounts(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object of resource amounts");
    std::vector<std::pair<std::string, long long>> out;
    for (auto it = v.begin(); it != v.end(); ++it)
        out.emplace_back(it.key(), expect_int(it.value(), path + "." + it.key()));
    std::sort(out.begin(), out.end());
    return out;
}

ConditionPtr parse_condition(const json& v, const std::string& path) {
    auto c = std::make_shared<Condition>();
    if (v.is_boolean()) {
        if (!v.get<bool>()) fail(path, "constant-false condition is not allowed");
        c->kind = Condition::Kind::Always;
        return c;
    }
    if (!v.is_object() || v.size() != 1) fail(path, "expected a condition object with one key");
    auto it = v.begin();
    const std::string key = it.key();
    const json& body = it.value();
    if (key == "done") {
        c->kind = Condition::Kind::Done;
        c->id = expect_string(body, path + ".done");
    } else if (key == "resource") {
        c->kind = Condition::Kind::Resource;
        if (!body.is_object()) fail(path + ".resource", "expected an object");
        c->id = expect_string(body.at("id"), path + ".resource.id");
        std::string op = body.contains("op") ? expect_string(body["op"], path + ".resource.op") : ">=";
        if (op == "<") c->cmp = Condition::Cmp::Lt;
        else if (op == "<=") c->cmp = Condition::Cmp::Le;
        else if (op == "==") c->cmp = Condition::Cmp::Eq;
        else if (op == ">=") c->cmp = Condition::Cmp::Ge;
        else if (op == ">") c->cmp = Condition::Cmp::Gt;
        else fail(path + ".resource.op", "unknown comparison '" + op + "'");
        c->threshold = expect_int(body.at("value"), path + ".resource.value");
    } else if (key == "clock") {
        c->kind = Condition::Kind::Clock;
        if (!body.is_object()) fail(path + ".clock", "expected an object");
        c->lo = parse_rational(body.at("from"), path + ".clock.from");
        c->hi = parse_rational(body.at("to"), path + ".clock.to");
        if (!(c->lo < c->hi)) fail(path + ".clock", "window requires from < to");
    } else if (key == "all" || key == "any") {
        c->kind = key == "all" ? Condition::Kind::All : Condition::Kind::Any;
        if (!body.is_array()) fail(path + "." + key, "expected an array");
        for (std::size_t i = 0; i < body.size(); ++i)
            c->children.push_back(parse_condition(body[i], path + "." + key + "[" + std::to_string(i) + "]"));
    } else if (key == "not") {
        c->kind = Condition::Kind::Not;
        c->children.push_back(parse_condition(body, path + ".not"));
    } else {
        fail(path, "unknown condition '" + key + "'");
    }
    return c;
}

json condition_to_json(const Condition& c) {
    switch (c.kind) {
        case Condition::Kind::Always: return json(true);
        case Condition::Kind::Done: return json{{"done", c.id}};
        case Condition::Kind::Resource: {
            const char* op = "";
            switch (c.cmp) {
                case Condition::Cmp::Lt: op = "<"; break;
                case Condition::Cmp::Le: op = "<="; break;
                case Condition::Cmp::Eq: op = "=="; break;
                case Condition::Cmp::Ge: op = ">="; break;
                case Condition::Cmp::Gt: op = ">"; break;
            }
            return json{{"resource", {{"id", c.id}, {"op", op}, {"value", c.threshold}}}};
        }
        case Condition::Kind::Clock:
            return json{{"clock", {{"from", c.lo.is_integer() ? json(c.lo.num()) : json(c.lo.str())},
                                   {"to", c.hi.is_integer() ? json(c.hi.num()) : json(c.hi.str())}}}};
        case Condition::Kind::All:
        case Condition::Kind::Any: {
            json arr = json::array();
            for (const auto& ch : c.children) arr.push_back(condition_to_json(*ch));
            return json{{c.kind == Condition::Kind::All ? "all" : "any", arr}};
        }
        case Condition::Kind::Not: return json{{"not", condition_to_json(*c.children[0])}};
    }
    return json(true);
}

json rational_to_json(const Rational& r) {
    return r.is_integer() ? json(r.num()) : json(r.str());
}

void collect_condition_nodes(const Condition& c, std::set<std::string>& out) {
    if (c.kind == Condition::Kind::Done) out.insert(c.id);
    for (const auto& ch : c.children) collect_condition_nodes(*ch, out);
}

void collect_condition_resources(const Condition& c, std::set<std::string>& out, bool& uses_clock) {
    if (c.kind == Condition::Kind::Resource) out.insert(c.id);
    if (c.kind == Condition::Kind::Clock) uses_clock = true;
    for (const auto& ch : c.children) collect_condition_resources(*ch, out, uses_clock);
}

bool rule_matches_edge(const WeightRule& r, const Edge& e) {
    if (r.edge_tag)
        return std::find(e.tags.begin(), e.tags.end(), *r.edge_tag) != e.tags.end();
    return std::binary_search(r.edge_ids.begin(), r.edge_ids.end(), e.id);
}

void sort_rules(std::vector<WeightRule>& rules) {
    std::stable_sort(rules.begin(), rules.end(), [](const WeightRule& a, const WeightRule& b) {
        if (a.priority != b.priority) return a.priority < b.priority;
        return a.id < b.id;
    });
}

/// Reachable node ids from start over the current edge set (ignores
/// preconditions and resources; graph-level connectivity only).
std::set<std::string> reachable_from_start(const GameModel& m) {
    std::set<std::string> seen{m.start};
    std::deque<std::string> queue{m.start};
    while (!queue.empty()) {
        std::string cur = queue.front();
        queue.pop_front();
        for (int ei : m.out_edges[m.node_index.at(cur)]) {
            const std::string& to = m.edges[ei].to;
            if (seen.insert(to).second) queue.push_back(to);
        }
    }
    return seen;
}

} // namespace

// ---------------------------------------------------------------------------
// Loading and validation
// ---------------------------------------------------------------------------

void GameModel::finalize() {
    node_index.clear();
    edge_index.clear();
    resource_index.clear();
    for (std::size_t i = 0; i < nodes.size(); ++i) node_index[nodes[i].id] = static_cast<int>(i);
    for (std::size_t i = 0; i < edges.size(); ++i) edge_index[edges[i].id] = static_cast<int>(i);
    for (std::size_t i = 0; i < resources.size(); ++i) resource_index[resources[i].id] = static_cast<int>(i);
    out_edges.assign(nodes.size(), {});
    for (std::size_t i = 0; i < edges.size(); ++i)
        out_edges[node_index.at(edges[i].from)].push_back(static_cast<int>(i));
    sort_rules(rules);
}

GameModel load_model(const json& doc) {
    if (!doc.is_object()) throw ParseError("model document must be a JSON object");
    GameModel m;
    if (!doc.contains("version") || doc["version"] != kModelVersion)
        fail("version", std::string("expected \"") + kModelVersion + "\"");

    // resources first so node grants can be checked against them
    if (doc.contains("resources")) {
        const json& rs = doc["resources"];
        if (!rs.is_array()) fail("resources", "expected an array");
        for (std::size_t i = 0; i < rs.size(); ++i) {
            std::string path = "resources[" + std::to_string(i) + "]";
            ResourceDef r;
            r.id = expect_string(rs[i].at("id"), path + ".id");
            r.initial = rs[i].contains("initial") ? expect_int(rs[i]["initial"], path + ".initial") : 0;
            if (r.initial < 0) fail(path + ".initial", "initial ≥ 0");
            if (rs[i].contains("cap") && !rs[i]["cap"].is_null()) {
                r.cap = expect_int(rs[i]["cap"], path + ".cap");
                if (*r.cap < r.initial) fail(path + ".cap", "cap must be ≥ initial");
            }
            for (const auto& prev : m.resources)
                if (prev.id == r.id) fail(path + ".id", "duplicate resource id '" + r.id + "'");
            m.resources.push_back(std::move(r));
        }
    }
    auto has_resource = [&](const std::string& id) {
        for (const auto& r : m.resources)
            if (r.id == id) return true;
        return false;
    };

    if (doc.contains("clock") && !doc["clock"].is_null()) {
        const json& c = doc["clock"];
        if (!c.is_object()) fail("clock", "expected an object");
        Rational p = parse_rational(c.at("period"), "clock.period");
        if (!(Rational(0) < p)) fail("clock.period", "period must be positive");
        m.clock_period = p;
    }

    if (!doc.contains("nodes")) fail("nodes", "missing");
    const json& ns = doc["nodes"];
    if (!ns.is_array()) fail("nodes", "expected an array");
    for (std::size_t i = 0; i < ns.size(); ++i) {
        std::string path = "nodes[" + std::to_string(i) + "]";
        EventNode n;
        n.id = expect_string(ns[i].at("id"), path + ".id");
        if (ns[i].contains("repeatable")) {
            if (!ns[i]["repeatable"].is_boolean()) fail(path + ".repeatable", "expected a boolean");
            n.repeatable = ns[i]["repeatable"].get<bool>();
        }
        if (ns[i].contains("grants")) {
            n.grants = parse_amounts(ns[i]["grants"], path + ".grants");
            for (const auto& [rid, delta] : n.grants) {
                if (!has_resource(rid)) fail(path + ".grants", "unknown resource '" + rid + "'");
                if (delta < 0) fail(path + ".grants." + rid, "grant delta ≥ 0");
            }
        }
        if (ns[i].contains("cluster_tag") && !ns[i]["cluster_tag"].is_null())
            n.cluster_tag = expect_string(ns[i]["cluster_tag"], path + ".cluster_tag");
        if (ns[i].contains("tags")) n.tags = parse_string_list(ns[i]["tags"], path + ".tags");
        for (const auto& prev : m.nodes)
            if (prev.id == n.id) fail(path + ".id", "duplicate node id '" + n.id + "'");
        m.nodes.push_back(std::move(n));
    }
    auto has_node = [&](const std::string& id) {
        for (const auto& n : m.nodes)
            if (n.id == id) return true;
        return false;
    };

    if (!doc.contains("edges")) fail("edges", "missing");
    const json& es = doc["edges"];
    if (!es.is_array()) fail("edges", "expected an array");
    for (std::size_t i = 0; i < es.size(); ++i) {
        std::string path = "edges[" + std::to_string(i) + "]";
        Edge e;
        e.id = expect_string(es[i].at("id"), path + ".id");
        e.from = expect_string(es[i].at("from"), path + ".from");
        e.to = expect_string(es[i].at("to"), path + ".to");
        if (!has_node(e.from)) fail(path + ".from", "unknown node '" + e.from + "'");
        if (!has_node(e.to)) fail(path + ".to", "unknown node '" + e.to + "'");
        e.base.time = parse_rational(es[i].at("time"), path + ".time");
        if (e.base.time.is_negative()) fail(path + ".time", "time ≥ 0");
        if (es[i].contains("difficulty")) {
            long long d = expect_int(es[i]["difficulty"], path + ".difficulty");
            if (d < 0 || d > 10) fail(path + ".difficulty", "difficulty must be in 0..10");
            e.base.difficulty = static_cast<int>(d);
        }
        if (es[i].contains("hidden_gain")) {
            e.base.hidden_gain = parse_rational(es[i]["hidden_gain"], path + ".hidden_gain");
            if (e.base.hidden_gain.is_negative()) fail(path + ".hidden_gain", "hidden_gain ≥ 0");
        }
        if (es[i].contains("requires")) {
            e.requires_ = parse_amounts(es[i]["requires"], path + ".requires");
            for (const auto& [rid, amt] : e.requires_) {
                if (!has_resource(rid)) fail(path + ".requires", "unknown resource '" + rid + "'");
                if (amt < 0) fail(path + ".requires." + rid, "amount ≥ 0");
            }
        }
        if (es[i].contains("preconditions")) {
            e.preconditions = parse_string_list(es[i]["preconditions"], path + ".preconditions");
            for (const auto& p : e.preconditions)
                if (!has_node(p)) fail(path + ".preconditions", "unknown node '" + p + "'");
        }
        if (es[i].contains("tags")) e.tags = parse_string_list(es[i]["tags"], path + ".tags");
        for (const auto& prev : m.edges)
            if (prev.id == e.id) fail(path + ".id", "duplicate edge id '" + e.id + "'");
        m.edges.push_back(std::move(e));
    }

    if (doc.contains("rules")) {
        const json& rs = doc["rules"];
        if (!rs.is_array()) fail("rules", "expected an array");
        for (std::size_t i = 0; i < rs.size(); ++i) {
            std::string path = "rules[" + std::to_string(i) + "]";
            WeightRule r;
            r.id = expect_string(rs[i].at("id"), path + ".id");
            if (rs[i].contains("priority")) r.priority = static_cast<int>(expect_int(rs[i]["priority"], path + ".priority"));
            r.condition = rs[i].contains("condition") ? parse_condition(rs[i]["condition"], path + ".condition")
                                                      : std::make_shared<Condition>();
            if (rs[i].contains("edges") == rs[i].contains("tag"))
                fail(path, "rule needs exactly one of 'edges' or 'tag'");
            if (rs[i].contains("edges")) {
                r.edge_ids = parse_string_list(rs[i]["edges"], path + ".edges");
                std::sort(r.edge_ids.begin(), r.edge_ids.end());
                for (const auto& eid : r.edge_ids) {
                    bool found = false;
                    for (const auto& e : m.edges) found = found || e.id == eid;
                    if (!found) fail(path + ".edges", "unknown edge '" + eid + "'");
                }
            } else {
                r.edge_tag = expect_string(rs[i]["tag"], path + ".tag");
                bool found = false;
                for (const auto& e : m.edges)
                    found = found || std::find(e.tags.begin(), e.tags.end(), *r.edge_tag) != e.tags.end();
                if (!found) fail(path + ".tag", "tag '" + *r.edge_tag + "' matches no edge");
            }
            std::string comp = expect_string(rs[i].at("component"), path + ".component");
            if (comp == "time") r.component = WeightComponent::Time;
            else if (comp == "difficulty") r.component = WeightComponent::Difficulty;
            else if (comp == "hidden_gain") r.component = WeightComponent::HiddenGain;
            else fail(path + ".component", "unknown component '" + comp + "'");
            const json& eff = rs[i].at("effect");
            if (!eff.is_object() || eff.size() != 1) fail(path + ".effect", "expected {set|add|multiply: value}");
            auto it = eff.begin();
            if (it.key() == "set") r.effect = EffectKind::Set;
            else if (it.key() == "add") r.effect = EffectKind::Add;
            else if (it.key() == "multiply") r.effect = EffectKind::Multiply;
            else fail(path + ".effect", "unknown effect '" + it.key() + "'");
            r.value = parse_rational(it.value(), path + ".effect." + it.key());

            std::set<std::string> cond_nodes, cond_res;
            bool uses_clock = false;
            collect_condition_nodes(*r.condition, cond_nodes);
            collect_condition_resources(*r.condition, cond_res, uses_clock);
            for (const auto& nid : cond_nodes)
                if (!has_node(nid)) fail(path + ".condition", "unknown node '" + nid + "'");
            for (const auto& rid : cond_res)
                if (!has_resource(rid)) fail(path + ".condition", "unknown resource '" + rid + "'");
            if (uses_clock && !m.clock_period) fail(path + ".condition", "clock condition but model has no clock");
            for (const auto& prev : m.rules)
                if (prev.id == r.id) fail(path + ".id", "duplicate rule id '" + r.id + "'");
            m.rules.push_back(std::move(r));
        }
    }

    if (!doc.contains("start")) fail("start", "missing");
    m.start = expect_string(doc["start"], "start");
    if (!has_node(m.start)) fail("start", "unknown node '" + m.start + "'");
    if (!doc.contains("ends")) fail("ends", "missing");
    for (const auto& e : parse_string_list(doc["ends"], "ends")) {
        if (!has_node(e)) fail("ends", "unknown node '" + e + "'");
        m.ends.insert(e);
    }
    if (m.ends.empty()) fail("ends", "must be non-empty");
    if (doc.contains("required"))
        for (const auto& r : parse_string_list(doc["required"], "required")) {
            if (!has_node(r)) fail("required", "unknown node '" + r + "'");
            m.required.insert(r);
        }
    if (doc.contains("reduced") && doc["reduced"].is_boolean()) m.reduced = doc["reduced"].get<bool>();

    m.finalize();
    return m;
}

GameModel load_model_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
    return load_model(doc);
}

GameModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_model_text(ss.str());
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

json model_to_json(const GameModel& m) {
    json doc;
    doc["version"] = kModelVersion;
    doc["start"] = m.start;
    doc["ends"] = m.ends;
    doc["required"] = m.required;
    if (m.clock_period) doc["clock"] = {{"period", rational_to_json(*m.clock_period)}};
    if (m.reduced) doc["reduced"] = true;
    doc["resources"] = json::array();
    for (const auto& r : m.resources) {
        json jr = {{"id", r.id}, {"initial", r.initial}};
        if (r.cap) jr["cap"] = *r.cap;
        doc["resources"].push_back(jr);
    }
    doc["nodes"] = json::array();
    for (const auto& n : m.nodes) {
        json jn = {{"id", n.id}};
        if (n.repeatable) jn["repeatable"] = true;
        if (!n.grants.empty()) {
            json g = json::object();
            for (const auto& [rid, d] : n.grants) g[rid] = d;
            jn["grants"] = g;
        }
        if (n.cluster_tag) jn["cluster_tag"] = *n.cluster_tag;
        if (!n.tags.empty()) jn["tags"] = n.tags;
        doc["nodes"].push_back(jn);
    }
    doc["edges"] = json::array();
    for (const auto& e : m.edges) {
        json je = {{"id", e.id}, {"from", e.from}, {"to", e.to}, {"time", rational_to_json(e.base.time)}};
        if (e.base.difficulty != 0) je["difficulty"] = e.base.difficulty;
        if (!e.base.hidden_gain.is_zero()) je["hidden_gain"] = rational_to_json(e.base.hidden_gain);
        if (!e.requires_.empty()) {
            json r = json::object();
            for (const auto& [rid, a] : e.requires_) r[rid] = a;
            je["requires"] = r;
        }
        if (!e.preconditions.empty()) je["preconditions"] = e.preconditions;
        if (!e.tags.empty()) je["tags"] = e.tags;
        doc["edges"].push_back(je);
    }
    doc["rules"] = json::array();
    for (const auto& r : m.rules) {
        json jr = {{"id", r.id}, {"priority", r.priority}, {"condition", condition_to_json(*r.condition)}};
        if (r.edge_tag) jr["tag"] = *r.edge_tag;
        else jr["edges"] = r.edge_ids;
        switch (r.component) {
            case WeightComponent::Time: jr["component"] = "time"; break;
            case WeightComponent::Difficulty: jr["component"] = "difficulty"; break;
            case WeightComponent::HiddenGain: jr["component"] = "hidden_gain"; break;
        }
        const char* eff = r.effect == EffectKind::Set ? "set" : r.effect == EffectKind::Add ? "add" : "multiply";
        jr["effect"] = {{eff, rational_to_json(r.value)}};
        doc["rules"].push_back(jr);
    }
    return doc;
}

std::string model_hash(const GameModel& m) {
    std::string canon = model_to_json(m).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

// ---------------------------------------------------------------------------
// Transformations
// ---------------------------------------------------------------------------

namespace {

/// Drops rules that reference removed nodes/edges; prunes id selectors.
std::vector<WeightRule> prune_rules(const std::vector<WeightRule>& rules,
                                    const std::vector<EventNode>& nodes,
                                    const std::vector<Edge>& edges) {
    std::set<std::string> node_ids, edge_ids;
    for (const auto& n : nodes) node_ids.insert(n.id);
    for (const auto& e : edges) edge_ids.insert(e.id);
    std::vector<WeightRule> out;
    for (const auto& r : rules) {
        std::set<std::string> cond_nodes;
        collect_condition_nodes(*r.condition, cond_nodes);
        bool dangling = false;
        for (const auto& nid : cond_nodes) dangling = dangling || !node_ids.count(nid);
        if (dangling) continue;
        WeightRule copy = r;
        if (copy.edge_tag) {
            bool found = false;
            for (const auto& e : edges)
                found = found || std::find(e.tags.begin(), e.tags.end(), *copy.edge_tag) != e.tags.end();
            if (!found) continue;
        } else {
            std::vector<std::string> kept;
            for (const auto& eid : copy.edge_ids)
                if (edge_ids.count(eid)) kept.push_back(eid);
            if (kept.empty()) continue;
            copy.edge_ids = std::move(kept);
        }
        out.push_back(std::move(copy));
    }
    return out;
}

} // namespace

GameModel reduce_model(const GameModel& m) {
    std::set<std::string> keep{m.start};
    keep.insert(m.ends.begin(), m.ends.end());
    keep.insert(m.required.begin(), m.required.end());

    GameModel out;
    out.resources = m.resources;
    out.clock_period = m.clock_period;
    out.start = m.start;
    out.ends = m.ends;
    out.required = m.required;
    out.reduced = true;
    for (const auto& n : m.nodes)
        if (keep.count(n.id)) out.nodes.push_back(n);
    for (const auto& e : m.edges) {
        if (!keep.count(e.from) || !keep.count(e.to)) continue;
        bool dangling_pre = false;
        for (const auto& p : e.preconditions) dangling_pre = dangling_pre || !keep.count(p);
        if (dangling_pre) continue; // precondition can never be satisfied anymore
        out.edges.push_back(e);
    }
    out.rules = prune_rules(m.rules, out.nodes, out.edges);
    out.finalize();

    auto reachable = reachable_from_start(out);
    bool end_ok = false;
    for (const auto& e : out.ends) end_ok = end_ok || reachable.count(e);
    if (!end_ok) throw InfeasibleError("reduced model infeasible: no end reachable from start");
    return out;
}

GameModel cluster_nodes(const GameModel& m) {
    // group members by cluster_tag
    std::map<std::string, std::vector<std::string>> groups;
    for (const auto& n : m.nodes)
        if (n.cluster_tag) groups[*n.cluster_tag].push_back(n.id);

    std::map<std::string, std::string> remap; // member id -> merged id
    for (auto& [tag, members] : groups) {
        std::sort(members.begin(), members.end());
        bool has_start = false, has_end = false;
        for (const auto& id : members) {
            has_start = has_start || id == m.start;
            has_end = has_end || m.ends.count(id);
        }
        if (has_start && has_end)
            throw ValidationError("cluster '" + tag + "' contains both the start and an end node");
        for (const auto& id : members) remap[id] = members.front();
    }
    auto mapped = [&](const std::string& id) {
        auto it = remap.find(id);
        return it == remap.end() ? id : it->second;
    };

    GameModel out;
    out.resources = m.resources;
    out.clock_period = m.clock_period;
    out.start = mapped(m.start);
    for (const auto& e : m.ends) out.ends.insert(mapped(e));
    for (const auto& r : m.required) out.required.insert(mapped(r));
    out.reduced = m.reduced;

    std::set<std::string> emitted;
    for (const auto& n : m.nodes) {
        std::string mid = mapped(n.id);
        if (!emitted.insert(mid).second) continue;
        if (mid == n.id && (!n.cluster_tag || groups[*n.cluster_tag].size() == 1)) {
            out.nodes.push_back(n);
            continue;
        }
        // merged node
        const auto& members = groups[*n.cluster_tag];
        EventNode merged;
        merged.id = mid;
        merged.cluster_tag = n.cluster_tag;
        merged.repeatable = true;
        std::map<std::string, long long> grant_sum;
        std::set<std::string> tag_union;
        for (const auto& member_id : members) {
            const EventNode& member = m.node(member_id);
            merged.repeatable = merged.repeatable && member.repeatable;
            for (const auto& [rid, d] : member.grants) grant_sum[rid] += d;
            tag_union.insert(member.tags.begin(), member.tags.end());
        }
        for (const auto& [rid, d] : grant_sum) merged.grants.emplace_back(rid, d);
        merged.tags.assign(tag_union.begin(), tag_union.end());
        out.nodes.push_back(std::move(merged));
    }

    // drop intra-cluster edges, remap the rest, dedup parallel edges
    std::map<std::tuple<std::string, std::string, std::vector<std::string>>, Edge> best;
    std::vector<std::tuple<std::string, std::string, std::vector<std::string>>> order;
    for (const auto& e : m.edges) {
        std::string f = mapped(e.from), t = mapped(e.to);
        bool internal = f == t && e.from != e.to; // merged away
        if (internal) continue;
        Edge copy = e;
        copy.from = f;
        copy.to = t;
        std::set<std::string> pre;
        for (const auto& p : e.preconditions) pre.insert(mapped(p));
        copy.preconditions.assign(pre.begin(), pre.end());
        std::vector<std::string> sorted_tags = copy.tags;
        std::sort(sorted_tags.begin(), sorted_tags.end());
        auto key = std::make_tuple(f, t, sorted_tags);
        auto it = best.find(key);
        if (it == best.end()) {
            best.emplace(key, copy);
            order.push_back(key);
        } else if (copy.base.time < it->second.base.time ||
                   (copy.base.time == it->second.base.time && copy.id < it->second.id)) {
            it->second = copy;
        }
    }
    for (const auto& key : order) out.edges.push_back(best.at(key));

    // rules: remap condition node references, then prune dangling selectors
    std::vector<WeightRule> rules = m.rules;
    for (auto& r : rules) {
        std::set<std::string> cond_nodes;
        collect_condition_nodes(*r.condition, cond_nodes);
        bool needs_remap = false;
        for (const auto& nid : cond_nodes) needs_remap = needs_remap || mapped(nid) != nid;
        if (!needs_remap) continue;
        // rebuild the condition tree with remapped ids
        std::function<ConditionPtr(const Condition&)> rebuild = [&](const Condition& c) -> ConditionPtr {
            auto copy = std::make_shared<Condition>(c);
            if (c.kind == Condition::Kind::Done) copy->id = mapped(c.id);
            copy->children.clear();
            for (const auto& ch : c.children) copy->children.push_back(rebuild(*ch));
            return copy;
        };
        r.condition = rebuild(*r.condition);
    }
    out.rules = prune_rules(rules, out.nodes, out.edges);
    out.finalize();
    return out;
}

GameModel apply_ruleset(const GameModel& m, const std::set<std::string>& banned_tags) {
    if (banned_tags.empty()) return m;
    GameModel out = m;
    out.edges.clear();
    for (const auto& e : m.edges) {
        bool banned = false;
        for (const auto& t : e.tags) banned = banned || banned_tags.count(t);
        if (!banned) out.edges.push_back(e);
    }
    out.rules = prune_rules(m.rules, out.nodes, out.edges);
    out.finalize();

    auto reachable = reachable_from_start(out);
    for (const auto& r : out.required)
        if (!reachable.count(r))
            throw InfeasibleError("ruleset makes required node '" + r + "' unreachable");
    bool end_ok = false;
    for (const auto& e : out.ends) end_ok = end_ok || reachable.count(e);
    if (!end_ok) throw InfeasibleError("ruleset leaves no end reachable from start");
    return out;
}

// ---------------------------------------------------------------------------
// Weight resolution
// ---------------------------------------------------------------------------

bool eval_condition(const GameModel& m, const Condition& c, const EvalState& s) {
    switch (c.kind) {
        case Condition::Kind::Always: return true;
        case Condition::Kind::Done: return s.visited[m.node_index.at(c.id)] != 0;
        case Condition::Kind::Resource: {
            long long v = s.resources[m.resource_index.at(c.id)];
            switch (c.cmp) {
                case Condition::Cmp::Lt: return v < c.threshold;
                case Condition::Cmp::Le: return v <= c.threshold;
                case Condition::Cmp::Eq: return v == c.threshold;
                case Condition::Cmp::Ge: return v >= c.threshold;
                case Condition::Cmp::Gt: return v > c.threshold;
            }
            return false;
        }
        case Condition::Kind::Clock: return c.lo <= s.clock && s.clock < c.hi;
        case Condition::Kind::All:
            for (const auto& ch : c.children)
                if (!eval_condition(m, *ch, s)) return false;
            return true;
        case Condition::Kind::Any:
            for (const auto& ch : c.children)
                if (eval_condition(m, *ch, s)) return true;
            return false;
        case Condition::Kind::Not: return !eval_condition(m, *c.children[0], s);
    }
    return false;
}

EdgeWeight resolve_weight(const GameModel& m, const std::string& edge_id, const EvalState& s) {
    const Edge& e = m.edge(edge_id);
    Rational time = e.base.time;
    Rational difficulty(e.base.difficulty);
    Rational hidden = e.base.hidden_gain;
    Rational zero(0);
    for (const auto& r : m.rules) { // rules already in (priority, id) order
        if (!rule_matches_edge(r, e)) continue;
        if (!eval_condition(m, *r.condition, s)) continue;
        Rational* target = r.component == WeightComponent::Time ? &time
                         : r.component == WeightComponent::Difficulty ? &difficulty
                                                                     : &hidden;
        switch (r.effect) {
            case EffectKind::Set: *target = r.value; break;
            case EffectKind::Add: *target += r.value; break;
            case EffectKind::Multiply: *target *= r.value; break;
        }
        if (r.component != WeightComponent::Difficulty && target->is_negative()) *target = zero;
    }
    EdgeWeight out;
    out.time = time;
    out.hidden_gain = hidden;
    long long d = (difficulty + Rational(1, 2)).floor(); // round half up
    out.difficulty = static_cast<int>(std::clamp(d, 0ll, 10ll));
    return out;
}

// ---------------------------------------------------------------------------
// Route evaluation
// ---------------------------------------------------------------------------

EvalState initial_eval_state(const GameModel& m) {
    EvalState s;
    s.at = m.node_index.at(m.start);
    s.visited.assign(m.nodes.size(), 0);
    s.resources.resize(m.resources.size());
    for (std::size_t i = 0; i < m.resources.size(); ++i) s.resources[i] = m.resources[i].initial;
    s.clock = Rational(0);
    // arrival at the start applies its grants
    s.visited[s.at] = 1;
    for (const auto& [rid, d] : m.nodes[s.at].grants) {
        int ri = m.resource_index.at(rid);
        s.resources[ri] += d;
        if (m.resources[ri].cap && s.resources[ri] > *m.resources[ri].cap) s.resources[ri] = *m.resources[ri].cap;
    }
    return s;
}

namespace {

Route simulate(const GameModel& m, const std::vector<std::string>& steps,
               std::vector<std::string>* violations) {
    auto report = [&](const std::string& msg) {
        if (!violations) throw RouteError(msg);
        violations->push_back(msg);
    };

    EvalState s = initial_eval_state(m);
    Route route;
    route.total_time = Rational(0);
    route.covered.insert(m.start);

    for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string& eid = steps[i];
        auto it = m.edge_index.find(eid);
        if (it == m.edge_index.end()) {
            report("step " + std::to_string(i) + ": unknown edge '" + eid + "'");
            continue;
        }
        const Edge& e = m.edges[it->second];
        if (m.node_index.at(e.from) != s.at) {
            report("step " + std::to_string(i) + ": broken chain, edge '" + eid + "' starts at '" + e.from +
                   "' but the walk is at '" + m.nodes[s.at].id + "'");
            s.at = m.node_index.at(e.from); // resynchronize so later checks still run
        }
        for (const auto& p : e.preconditions)
            if (!s.visited[m.node_index.at(p)])
                report("step " + std::to_string(i) + ": edge '" + eid + "' precondition not met, node '" + p +
                       "' not done");
        for (const auto& [rid, amt] : e.requires_) {
            int ri = m.resource_index.at(rid);
            if (s.resources[ri] < amt)
                report("step " + std::to_string(i) + ": edge '" + eid + "' short of resource '" + rid + "' (have " +
                       std::to_string(s.resources[ri]) + ", need " + std::to_string(amt) + ")");
        }
        EdgeWeight w = resolve_weight(m, eid, s);
        for (const auto& [rid, amt] : e.requires_) {
            int ri = m.resource_index.at(rid);
            s.resources[ri] = std::max(0ll, s.resources[ri] - amt);
        }
        route.total_time += w.time;
        route.max_difficulty = std::max(route.max_difficulty, w.difficulty);
        if (m.clock_period) s.clock = (s.clock + w.time).mod(*m.clock_period);
        route.steps.push_back(RouteStep{it->second, w});

        int to = m.node_index.at(e.to);
        s.at = to;
        const EventNode& dest = m.nodes[to];
        if (dest.repeatable || !s.visited[to]) {
            for (const auto& [rid, d] : dest.grants) {
                int ri = m.resource_index.at(rid);
                s.resources[ri] += d;
                if (m.resources[ri].cap && s.resources[ri] > *m.resources[ri].cap)
                    s.resources[ri] = *m.resources[ri].cap;
            }
        }
        s.visited[to] = 1;
        route.covered.insert(e.to);
    }

    if (!m.ends.count(m.nodes[s.at].id)) report("walk must end in V_ω (ends at '" + m.nodes[s.at].id + "')");
    for (const auto& r : m.required)
        if (!route.covered.count(r)) report("required node '" + r + "' never visited");
    return route;
}

} // namespace

Route evaluate_route(const GameModel& m, const std::vector<std::string>& steps) {
    return simulate(m, steps, nullptr);
}

std::vector<std::string> validate_route(const GameModel& m, const std::vector<std::string>& steps) {
    std::vector<std::string> violations;
    simulate(m, steps, &violations);
    return violations;
}

// ---------------------------------------------------------------------------
// Route documents and DOT export
// ---------------------------------------------------------------------------

json route_to_json(const GameModel& m, const Route& r) {
    json doc;
    doc["version"] = kRouteVersion;
    doc["model_hash"] = model_hash(m);
    json steps = json::array();
    for (const auto& s : r.steps) steps.push_back(m.edges[s.edge].id);
    doc["steps"] = steps;
    doc["totals"] = {{"time", rational_to_json(r.total_time)},
                     {"max_difficulty", r.max_difficulty}};
    return doc;
}

std::vector<std::string> route_steps_from_json(const json& doc, std::string* hash_out) {
    if (!doc.is_object() || !doc.contains("steps") || !doc["steps"].is_array())
        throw ParseError("route document must contain a 'steps' array");
    if (hash_out && doc.contains("model_hash") && doc["model_hash"].is_string())
        *hash_out = doc["model_hash"].get<std::string>();
    std::vector<std::string> steps;
    for (const auto& s : doc["steps"]) {
        if (!s.is_string()) throw ParseError("route steps must be edge id strings");
        steps.push_back(s.get<std::string>());
    }
    return steps;
}

std::string export_dot(const GameModel& m) {
    std::ostringstream os;
    os << "digraph game {\n  rankdir=LR;\n";
    for (const auto& n : m.nodes) {
        os << "  \"" << n.id << "\" [";
        if (n.id == m.start) os << "shape=Mdiamond";
        else if (m.ends.count(n.id)) os << "shape=Msquare";
        else if (m.required.count(n.id)) os << "shape=doublecircle";
        else os << "shape=circle";
        if (n.repeatable) os << ", style=dashed";
        os << "];\n";
    }
    for (const auto& e : m.edges) {
        os << "  \"" << e.from << "\" -> \"" << e.to << "\" [label=\"" << e.id << " (" << e.base.time.str();
        if (e.base.difficulty != 0) os << ", d" << e.base.difficulty;
        os << ")\"];\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace speedroute
