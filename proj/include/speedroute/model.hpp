#ifndef SPEEDROUTE_MODEL_HPP
#define SPEEDROUTE_MODEL_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "speedroute/rational.hpp"

namespace speedroute {

using json = nlohmann::json;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Validation failure; `what()` carries the path to the offending field.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RouteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A transformation left the model without any feasible route.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Model types
// ---------------------------------------------------------------------------

struct EventNode {
    std::string id;
    bool repeatable = false;
    std::vector<std::pair<std::string, long long>> grants; // resource id -> delta >= 0
    std::optional<std::string> cluster_tag;
    std::vector<std::string> tags;
};

struct EdgeWeight {
    Rational time;               // >= 0 seconds
    int difficulty = 0;          // 0..10
    Rational hidden_gain;        // >= 0 seconds, advisory only
};

struct Edge {
    std::string id;
    std::string from;
    std::string to;
    EdgeWeight base;
    std::vector<std::pair<std::string, long long>> requires_; // consumed on traversal
    std::vector<std::string> preconditions;                   // node ids that must be done
    std::vector<std::string> tags;
};

struct Condition;
using ConditionPtr = std::shared_ptr<const Condition>;

/// Boolean expression over done(node), resource comparisons and clock windows.
struct Condition {
    enum class Kind { Always, Done, Resource, Clock, All, Any, Not };
    enum class Cmp { Lt, Le, Eq, Ge, Gt };

    Kind kind = Kind::Always;
    std::string id;          // node id (Done) or resource id (Resource)
    Cmp cmp = Cmp::Ge;
    long long threshold = 0;
    Rational lo, hi;         // clock window [lo, hi)
    std::vector<ConditionPtr> children;
};

enum class WeightComponent { Time, Difficulty, HiddenGain };
enum class EffectKind { Set, Add, Multiply };

struct WeightRule {
    std::string id;
    int priority = 0;
    ConditionPtr condition;
    std::vector<std::string> edge_ids;     // explicit selector, or
    std::optional<std::string> edge_tag;   // tag selector
    WeightComponent component = WeightComponent::Time;
    EffectKind effect = EffectKind::Add;
    Rational value;
};

struct ResourceDef {
    std::string id;
    long long initial = 0;
    std::optional<long long> cap; // absent = unbounded
};

struct GameModel {
    std::vector<EventNode> nodes;
    std::vector<Edge> edges;
    std::vector<WeightRule> rules; // kept sorted by (priority, id)
    std::vector<ResourceDef> resources;
    std::optional<Rational> clock_period;
    std::string start;
    std::set<std::string> ends;
    std::set<std::string> required;
    bool reduced = false; // set by reduce_model; optimality may be sacrificed

    // derived indices, built by finalize()
    std::map<std::string, int> node_index;
    std::map<std::string, int> edge_index;
    std::map<std::string, int> resource_index;
    std::vector<std::vector<int>> out_edges; // per node index

    void finalize();

    const EventNode& node(const std::string& id) const { return nodes[node_index.at(id)]; }
    const Edge& edge(const std::string& id) const { return edges[edge_index.at(id)]; }
    bool has_node(const std::string& id) const { return node_index.count(id) != 0; }
    bool has_edge(const std::string& id) const { return edge_index.count(id) != 0; }
};

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Snapshot of the traversal history a weight rule can observe.
struct EvalState {
    int at = -1;                       // node index
    std::vector<char> visited;         // per node index, 1 once arrived at least once
    std::vector<long long> resources;  // per resource index
    Rational clock;                    // in-game clock in [0, period); unused without clock
};

struct RouteStep {
    int edge = -1;          // edge index
    EdgeWeight resolved;    // weight actually paid at this step
};

struct Route {
    std::vector<RouteStep> steps;
    Rational total_time;
    int max_difficulty = 0;
    std::set<std::string> covered; // node ids visited, including start
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

GameModel load_model(const json& doc);
GameModel load_model_text(const std::string& text);
GameModel load_model_file(const std::string& path);
json model_to_json(const GameModel& m);

/// FNV-1a over the canonical serialization, as a hex string.
std::string model_hash(const GameModel& m);

/// Keeps only start, ends and required nodes (with surviving edges and rules).
GameModel reduce_model(const GameModel& m);

/// Merges nodes sharing a cluster_tag.
GameModel cluster_nodes(const GameModel& m);

/// Removes every edge carrying a banned tag; reports infeasibility if that
/// disconnects a required node or all ends from the start.
GameModel apply_ruleset(const GameModel& m, const std::set<std::string>& banned_tags);

bool eval_condition(const GameModel& m, const Condition& c, const EvalState& s);

/// Base weight of `edge_id` with every matching rule applied in (priority, id)
/// order; pure function of (m, edge, s).
EdgeWeight resolve_weight(const GameModel& m, const std::string& edge_id, const EvalState& s);

EvalState initial_eval_state(const GameModel& m);

/// Simulates the walk, throwing RouteError on the first violation.
Route evaluate_route(const GameModel& m, const std::vector<std::string>& steps);

/// Collects every violation evaluate_route would raise; empty <=> feasible.
std::vector<std::string> validate_route(const GameModel& m, const std::vector<std::string>& steps);

json route_to_json(const GameModel& m, const Route& r);
std::vector<std::string> route_steps_from_json(const json& doc, std::string* hash_out = nullptr);

std::string export_dot(const GameModel& m);

} // namespace speedroute

#endif
