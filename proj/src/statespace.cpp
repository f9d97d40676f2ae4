#include "speedroute/statespace.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <unordered_map>

namespace speedroute {

namespace {

struct KeyHash {
    std::size_t operator()(const std::vector<long long>& v) const {
        std::size_t h = 1469598103934665603ull;
        for (long long x : v) {
            h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

/// Per-node rank in sorted-id order, for reproducible tie-breaking.
std::vector<int> id_ranks(const GameModel& m) {
    std::vector<int> order(m.nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return m.nodes[a].id < m.nodes[b].id; });
    std::vector<int> rank(m.nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
    return rank;
}

int done_count(const GameModel& m, const State& s) {
    int c = 0;
    for (std::size_t i = 0; i < m.nodes.size(); ++i)
        if (!m.nodes[i].repeatable && s.visited[i]) ++c;
    return c;
}

Rational bucket_start(const GameModel& m, const SearchConfig& cfg, int bucket) {
    if (!m.clock_period) return Rational(0);
    return *m.clock_period * Rational(bucket, cfg.clock_buckets);
}

/// Applies edge `ei` to state `s`; empty result means the transition is not
/// admissible under the model or the caps.
std::optional<std::pair<State, EdgeWeight>> step(const GameModel& m, const SearchConfig& cfg,
                                                 const State& s, int ei) {
    const Edge& e = m.edges[ei];
    for (const auto& p : e.preconditions)
        if (!s.visited[m.node_index.at(p)]) return std::nullopt;
    for (const auto& [rid, amt] : e.requires_)
        if (s.resources[m.resource_index.at(rid)] < amt) return std::nullopt;
    int to = m.node_index.at(e.to);
    const EventNode& dest = m.nodes[to];
    if (dest.repeatable && s.visits_used[to] >= cfg.repeat_cap) return std::nullopt;

    EdgeWeight w = resolve_weight(m, e.id, to_eval_state(m, cfg, s));
    if (cfg.difficulty_cap && w.difficulty > *cfg.difficulty_cap) return std::nullopt;

    State n = s;
    for (const auto& [rid, amt] : e.requires_) n.resources[m.resource_index.at(rid)] -= amt;
    n.at = to;
    if (dest.repeatable || !n.visited[to]) {
        for (const auto& [rid, d] : dest.grants) {
            int ri = m.resource_index.at(rid);
            n.resources[ri] += d;
            if (m.resources[ri].cap && n.resources[ri] > *m.resources[ri].cap)
                n.resources[ri] = *m.resources[ri].cap;
        }
    }
    if (dest.repeatable) ++n.visits_used[to];
    n.visited[to] = 1;
    if (m.clock_period && cfg.clock_buckets > 1) {
        Rational clock = (bucket_start(m, cfg, s.clock_bucket) + w.time).mod(*m.clock_period);
        Rational width = *m.clock_period * Rational(1, cfg.clock_buckets);
        long long b = (clock / width).floor();
        n.clock_bucket = static_cast<int>(std::clamp(b, 0ll, static_cast<long long>(cfg.clock_buckets - 1)));
    }
    return std::make_pair(std::move(n), w);
}

struct Entry {
    State state;
    Rational time;
    int parent = -1;
    int via_edge = -1;
    int order_idx = 0; // progress through an ordered-target list, if any
    bool closed = false;
};

struct CoreResult {
    SearchStatus status = SearchStatus::Disconnected;
    std::vector<std::string> steps;
    Rational time;
    State end_state;
    SearchStats stats;
};

/// Dijkstra over lazily generated states. `targets`, when non-empty, augments
/// state identity with an index that advances on arrival at the next target.
CoreResult run_search(const GameModel& m, const SearchConfig& cfg, const State& init,
                      const std::function<bool(const State&, int)>& goal,
                      const std::vector<int>& targets, const std::vector<char>* blocked = nullptr) {
    std::vector<int> rank = id_ranks(m);
    // position of each node in the ordered target list, -1 elsewhere
    std::vector<int> target_pos(m.nodes.size(), -1);
    for (std::size_t i = 0; i < targets.size(); ++i)
        if (targets[i] >= 0) target_pos[targets[i]] = static_cast<int>(i);
    std::vector<Entry> entries;
    std::unordered_map<std::vector<long long>, int, KeyHash> index;

    struct PQItem {
        Rational time;
        int neg_done;
        int rank;
        long long seq;
        int entry;
        bool operator>(const PQItem& o) const {
            if (time != o.time) return o.time < time;
            if (neg_done != o.neg_done) return neg_done > o.neg_done;
            if (rank != o.rank) return rank > o.rank;
            return seq > o.seq;
        }
    };
    std::priority_queue<PQItem, std::vector<PQItem>, std::greater<PQItem>> pq;
    long long seq = 0;
    CoreResult result;

    auto push = [&](State st, Rational time, int parent, int via, int order_idx) {
        auto key = st.key();
        if (!targets.empty()) key.push_back(order_idx);
        auto it = index.find(key);
        if (it != index.end()) {
            Entry& existing = entries[it->second];
            if (existing.closed || !(time < existing.time)) return;
            existing.time = time;
            existing.parent = parent;
            existing.via_edge = via;
            pq.push(PQItem{time, -done_count(m, st), rank[st.at], seq++, it->second});
            return;
        }
        int id = static_cast<int>(entries.size());
        entries.push_back(Entry{st, time, parent, via, order_idx, false});
        index.emplace(std::move(key), id);
        pq.push(PQItem{time, -done_count(m, entries[id].state), rank[entries[id].state.at], seq++, id});
        result.stats.frontier_peak = std::max(result.stats.frontier_peak, static_cast<long long>(pq.size()));
    };

    push(init, Rational(0), -1, -1, 0);
    while (!pq.empty()) {
        PQItem top = pq.top();
        pq.pop();
        Entry& cur = entries[top.entry];
        if (cur.closed || top.time != cur.time) continue;
        cur.closed = true;
        if (++result.stats.expanded > cfg.state_budget) {
            result.status = SearchStatus::BudgetExhausted;
            return result;
        }
        if (goal(cur.state, cur.order_idx)) {
            result.status = SearchStatus::Found;
            result.time = cur.time;
            result.end_state = cur.state;
            std::vector<std::string> rev;
            for (int at = top.entry; entries[at].via_edge >= 0; at = entries[at].parent)
                rev.push_back(m.edges[entries[at].via_edge].id);
            result.steps.assign(rev.rbegin(), rev.rend());
            return result;
        }
        // copy out: `entries` may reallocate during pushes
        State state = cur.state;
        Rational time = cur.time;
        int order_idx = cur.order_idx;
        for (int ei : m.out_edges[state.at]) {
            auto next = step(m, cfg, state, ei);
            if (!next) continue;
            int to = next->first.at;
            if (blocked && (*blocked)[to]) continue;
            int idx = order_idx;
            if (!targets.empty()) {
                int pos = target_pos[to];
                if (pos == idx) ++idx;
                else if (pos > idx && !state.visited[to]) continue; // premature first visit
            }
            push(std::move(next->first), time + next->second.time, top.entry, ei, idx);
        }
    }
    result.status = SearchStatus::Disconnected;
    return result;
}

} // namespace

std::vector<long long> State::key() const {
    std::vector<long long> k;
    k.reserve(2 + visited.size() + resources.size());
    k.push_back(at);
    k.push_back(clock_bucket);
    for (std::size_t i = 0; i < visited.size(); ++i)
        k.push_back(visits_used[i] > 0 ? visits_used[i] : visited[i]);
    for (long long r : resources) k.push_back(r);
    return k;
}

State initial_search_state(const GameModel& m, const SearchConfig& cfg) {
    State s;
    s.at = m.node_index.at(m.start);
    s.visited.assign(m.nodes.size(), 0);
    s.visits_used.assign(m.nodes.size(), 0);
    s.resources.resize(m.resources.size());
    for (std::size_t i = 0; i < m.resources.size(); ++i) s.resources[i] = m.resources[i].initial;
    s.visited[s.at] = 1;
    if (m.nodes[s.at].repeatable && cfg.repeat_cap > 0) s.visits_used[s.at] = 1;
    for (const auto& [rid, d] : m.nodes[s.at].grants) {
        int ri = m.resource_index.at(rid);
        s.resources[ri] += d;
        if (m.resources[ri].cap && s.resources[ri] > *m.resources[ri].cap) s.resources[ri] = *m.resources[ri].cap;
    }
    return s;
}

EvalState to_eval_state(const GameModel& m, const SearchConfig& cfg, const State& s) {
    EvalState e;
    e.at = s.at;
    e.visited = s.visited;
    e.resources = s.resources;
    e.clock = bucket_start(m, cfg, s.clock_bucket);
    return e;
}

SegmentResult search_segment(const GameModel& m, const SearchConfig& cfg, const State& from,
                             const std::function<bool(const State&)>& goal,
                             const std::vector<int>& avoid) {
    std::vector<char> blocked(m.nodes.size(), 0);
    for (int a : avoid) blocked[a] = 1;
    CoreResult core = run_search(
        m, cfg, from, [&](const State& s, int) { return goal(s); }, {},
        avoid.empty() ? nullptr : &blocked);
    SegmentResult out;
    out.status = core.status;
    out.steps = std::move(core.steps);
    out.time = core.time;
    out.end_state = std::move(core.end_state);
    out.stats = core.stats;
    return out;
}

SearchResult expand_and_search(const GameModel& m, const SearchConfig& cfg) {
    std::vector<int> required;
    for (const auto& r : m.required) required.push_back(m.node_index.at(r));
    auto goal = [&](const State& s, int) {
        if (!m.ends.count(m.nodes[s.at].id)) return false;
        for (int r : required)
            if (!s.visited[r]) return false;
        return true;
    };
    CoreResult core = run_search(m, cfg, initial_search_state(m, cfg), goal, {});
    SearchResult out;
    out.status = core.status;
    out.stats = core.stats;
    if (core.status == SearchStatus::Found) out.route = evaluate_route(m, core.steps);
    return out;
}

SearchResult search_ordered(const GameModel& m, const SearchConfig& cfg,
                            const std::vector<std::string>& target_order) {
    std::vector<int> targets;
    for (const auto& t : target_order) targets.push_back(m.node_index.at(t));
    int total = static_cast<int>(targets.size());
    auto goal = [&](const State& s, int idx) {
        return idx == total && m.ends.count(m.nodes[s.at].id) != 0;
    };
    State init = initial_search_state(m, cfg);
    // handle targets already satisfied by the initial placement (e.g. start)
    std::vector<int> pending;
    for (int t : targets)
        if (!(t == init.at))
            pending.push_back(t);
    total = static_cast<int>(pending.size());
    CoreResult core = run_search(m, cfg, init, goal, pending.empty() ? std::vector<int>{-1} : pending);
    SearchResult out;
    out.status = core.status;
    out.stats = core.stats;
    if (core.status == SearchStatus::Found) out.route = evaluate_route(m, core.steps);
    return out;
}

CountResult count_states(const GameModel& m, const SearchConfig& cfg) {
    CountResult out;
    std::unordered_map<std::vector<long long>, char, KeyHash> seen;
    std::deque<State> queue;
    State init = initial_search_state(m, cfg);
    seen.emplace(init.key(), 1);
    queue.push_back(init);
    out.count = 1;
    while (!queue.empty()) {
        State cur = queue.front();
        queue.pop_front();
        for (int ei : m.out_edges[cur.at]) {
            auto next = step(m, cfg, cur, ei);
            if (!next) continue;
            auto key = next->first.key();
            if (seen.emplace(std::move(key), 1).second) {
                ++out.count;
                if (out.count >= cfg.state_budget) {
                    out.budget_hit = true;
                    return out;
                }
                queue.push_back(std::move(next->first));
            }
        }
    }
    return out;
}

} // namespace speedroute
