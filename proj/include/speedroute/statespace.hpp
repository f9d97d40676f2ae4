#ifndef SPEEDROUTE_STATESPACE_HPP
#define SPEEDROUTE_STATESPACE_HPP

#include <functional>
#include <optional>

#include "speedroute/model.hpp"

namespace speedroute {

/// Finiteness caps for the expanded game-state graph.
struct SearchConfig {
    int repeat_cap = 3;                 // max visits of any repeatable node
    int clock_buckets = 1;              // 1 = clock ignored
    long long state_budget = 1000000;   // max expanded states per query
    std::optional<int> difficulty_cap;  // drop transitions harder than this
};

/// Canonical game state: node of the expanded state graph.
struct State {
    int at = -1;
    std::vector<char> visited;        // per node; for non-repeatables this is the done-set
    std::vector<int> visits_used;     // per node; meaningful for repeatables only
    std::vector<long long> resources; // per resource, clamped to [0, cap]
    int clock_bucket = 0;

    std::vector<long long> key() const;
};

State initial_search_state(const GameModel& m, const SearchConfig& cfg);

/// Rule-visible snapshot; the clock is pinned to the bucket's start time.
EvalState to_eval_state(const GameModel& m, const SearchConfig& cfg, const State& s);

enum class SearchStatus { Found, Disconnected, BudgetExhausted };

struct SearchStats {
    long long expanded = 0;
    long long frontier_peak = 0;
};

struct SegmentResult {
    SearchStatus status = SearchStatus::Disconnected;
    std::vector<std::string> steps; // edge ids
    Rational time;                  // label time of the goal state
    State end_state;
    SearchStats stats;
};

/// Dijkstra over lazily expanded states from `from` until `goal` holds.
/// Nodes in `avoid` (indices) are never entered during this segment.
SegmentResult search_segment(const GameModel& m, const SearchConfig& cfg, const State& from,
                             const std::function<bool(const State&)>& goal,
                             const std::vector<int>& avoid = {});

struct SearchResult {
    SearchStatus status = SearchStatus::Disconnected;
    Route route;
    SearchStats stats;
};

/// Minimum-time route covering all required events, optimal within the caps.
SearchResult expand_and_search(const GameModel& m, const SearchConfig& cfg);

/// Like expand_and_search but the required nodes listed in `target_order`
/// must receive their first visits in exactly that order.
SearchResult search_ordered(const GameModel& m, const SearchConfig& cfg,
                            const std::vector<std::string>& target_order);

struct CountResult {
    long long count = 0;
    bool budget_hit = false;
};

/// Exhaustively enumerates reachable states under the caps (no goal cutoff).
CountResult count_states(const GameModel& m, const SearchConfig& cfg);

} // namespace speedroute

#endif
