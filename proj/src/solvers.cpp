#include "speedroute/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <thread>

namespace speedroute {

namespace {

std::string cache_key(const Permutation& p, int cap) {
    std::string k = std::to_string(cap);
    for (const auto& id : p) {
        k += '|';
        k += id;
    }
    return k;
}

/// Shared per-run decode memo; populations revisit the same genomes a lot.
struct DecodeCache {
    const GameModel& m;
    const SearchConfig& cfg;
    std::map<std::string, DecodeResult> memo;

    const DecodeResult& get(const Permutation& p, int difficulty_cap = -1) {
        std::string key = cache_key(p, difficulty_cap);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        SearchConfig c = cfg;
        if (difficulty_cap >= 0) c.difficulty_cap = difficulty_cap;
        return memo.emplace(std::move(key), decode(m, p, c)).first->second;
    }

    /// Decodes all cache misses in `perms`, optionally across threads.
    void warm(const std::vector<Permutation>& perms, int workers, int difficulty_cap = -1) {
        std::vector<const Permutation*> missing;
        std::set<std::string> queued;
        for (const auto& p : perms) {
            std::string key = cache_key(p, difficulty_cap);
            if (!memo.count(key) && queued.insert(key).second) missing.push_back(&p);
        }
        if (missing.empty()) return;
        SearchConfig c = cfg;
        if (difficulty_cap >= 0) c.difficulty_cap = difficulty_cap;
        std::vector<DecodeResult> results(missing.size());
        if (workers <= 1 || missing.size() < 2) {
            for (std::size_t i = 0; i < missing.size(); ++i) results[i] = decode(m, *missing[i], c);
        } else {
            std::vector<std::thread> threads;
            std::size_t nthreads = std::min<std::size_t>(workers, missing.size());
            for (std::size_t t = 0; t < nthreads; ++t) {
                threads.emplace_back([&, t]() {
                    for (std::size_t i = t; i < missing.size(); i += nthreads)
                        results[i] = decode(m, *missing[i], c);
                });
            }
            for (auto& th : threads) th.join();
        }
        for (std::size_t i = 0; i < missing.size(); ++i)
            memo.emplace(cache_key(*missing[i], difficulty_cap), std::move(results[i]));
    }
};

} // namespace

/// Order crossover (OX1): child keeps a slice of a, fills the rest from b.
Permutation ox1_crossover(const Permutation& a, const Permutation& b, std::mt19937_64& rng) {
    std::size_t n = a.size();
    if (n < 2) return a;
    std::size_t i = rand_index(rng, n), j = rand_index(rng, n);
    if (i > j) std::swap(i, j);
    Permutation child(n);
    std::set<std::string> taken(a.begin() + i, a.begin() + j + 1);
    for (std::size_t k = i; k <= j; ++k) child[k] = a[k];
    std::size_t pos = (j + 1) % n;
    for (std::size_t k = 0; k < n; ++k) {
        const std::string& gene = b[(j + 1 + k) % n];
        if (taken.count(gene)) continue;
        child[pos] = gene;
        pos = (pos + 1) % n;
    }
    return child;
}

void mutate_permutation(Permutation& p, double rate, std::mt19937_64& rng) {
    if (p.size() < 2) return;
    if (rand_unit(rng) < rate) { // swap
        std::size_t i = rand_index(rng, p.size());
        std::size_t j = rand_index(rng, p.size());
        std::swap(p[i], p[j]);
    }
    if (rand_unit(rng) < rate) { // insertion
        std::size_t i = rand_index(rng, p.size());
        std::size_t j = rand_index(rng, p.size());
        std::string gene = p[i];
        p.erase(p.begin() + i);
        p.insert(p.begin() + j, gene);
    }
}

void shuffle_permutation(Permutation& p, std::mt19937_64& rng) {
    for (std::size_t i = p.size(); i > 1; --i) std::swap(p[i - 1], p[rand_index(rng, i)]);
}

namespace {

struct Fitness {
    bool feasible = false;
    Rational time;
    bool better_than(const Fitness& o) const {
        if (feasible != o.feasible) return feasible;
        if (!feasible) return false;
        return time < o.time;
    }
};

void enumerate_permutations(const std::vector<std::string>& base,
                            const std::map<std::string, std::set<std::string>>& prec,
                            std::vector<Permutation>& out, std::size_t limit) {
    Permutation cur;
    std::set<std::string> chosen;
    std::function<void()> rec = [&]() {
        if (out.size() >= limit) return;
        if (cur.size() == base.size()) {
            out.push_back(cur);
            return;
        }
        for (const auto& cand : base) {
            if (chosen.count(cand)) continue;
            bool ok = true;
            auto it = prec.find(cand);
            if (it != prec.end())
                for (const auto& pre : it->second)
                    ok = ok && (chosen.count(pre) || !std::count(base.begin(), base.end(), pre));
            if (!ok) continue;
            cur.push_back(cand);
            chosen.insert(cand);
            rec();
            chosen.erase(cand);
            cur.pop_back();
        }
    };
    rec();
}

std::vector<int> distinct_difficulty_levels(const GameModel& m, const SearchConfig& cfg) {
    std::set<int> levels;
    for (const auto& e : m.edges) levels.insert(e.base.difficulty);
    std::vector<int> out;
    for (int l : levels) {
        if (cfg.difficulty_cap && l > *cfg.difficulty_cap) continue;
        out.push_back(l);
    }
    if (out.empty()) out.push_back(cfg.difficulty_cap ? *cfg.difficulty_cap : 10);
    return out;
}

struct Objective {
    Rational time;
    int difficulty;
    bool operator<(const Objective& o) const {
        if (time != o.time) return time < o.time;
        return difficulty < o.difficulty;
    }
    bool operator==(const Objective& o) const { return time == o.time && difficulty == o.difficulty; }
};

Objective objective_of(const Route& r) { return Objective{r.total_time, r.max_difficulty}; }

/// Keeps `front` mutually non-dominated with one route per objective point.
void archive_insert(std::vector<Route>& front, const Route& candidate) {
    Objective c = objective_of(candidate);
    for (const auto& r : front) {
        Objective o = objective_of(r);
        if (o == c) return; // identical point already represented
        if (dominates(r, candidate)) return;
    }
    front.erase(std::remove_if(front.begin(), front.end(),
                               [&](const Route& r) { return dominates(candidate, r); }),
                front.end());
    front.push_back(candidate);
}

void sort_front(std::vector<Route>& front) {
    std::sort(front.begin(), front.end(),
              [](const Route& a, const Route& b) { return objective_of(a) < objective_of(b); });
}

void crowding_prune(std::vector<Route>& front, std::size_t cap) {
    sort_front(front);
    while (front.size() > cap) {
        // drop the most crowded interior point
        std::size_t worst = 1;
        double worst_gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i + 1 < front.size(); ++i) {
            double gap = front[i + 1].total_time.to_double() - front[i - 1].total_time.to_double() +
                         std::abs(front[i + 1].max_difficulty - front[i - 1].max_difficulty);
            if (gap < worst_gap) {
                worst_gap = gap;
                worst = i;
            }
        }
        front.erase(front.begin() + worst);
    }
}

} // namespace

bool dominates(const Route& a, const Route& b) {
    bool le = a.total_time <= b.total_time && a.max_difficulty <= b.max_difficulty;
    bool lt = a.total_time < b.total_time || a.max_difficulty < b.max_difficulty;
    return le && lt;
}

std::map<std::string, std::set<std::string>> required_precedence(const GameModel& m) {
    std::map<std::string, std::set<std::string>> prec;
    for (const auto& y : m.required) {
        std::optional<std::set<std::string>> common;
        for (const auto& e : m.edges) {
            if (e.to != y) continue;
            std::set<std::string> pre(e.preconditions.begin(), e.preconditions.end());
            if (!common) common = pre;
            else {
                std::set<std::string> inter;
                std::set_intersection(common->begin(), common->end(), pre.begin(), pre.end(),
                                      std::inserter(inter, inter.begin()));
                common = inter;
            }
        }
        if (common && !common->empty()) {
            common->erase(y);
            if (!common->empty()) prec[y] = *common;
        }
    }
    return prec;
}

std::vector<std::string> permutation_base(const GameModel& m) {
    std::vector<std::string> base;
    for (const auto& r : m.required)
        if (r != m.start) base.push_back(r);
    return base; // std::set iteration: already sorted
}

bool repair_permutation(const GameModel& m, const std::map<std::string, std::set<std::string>>& prec,
                        Permutation& p) {
    std::set<std::string> in_perm(p.begin(), p.end());
    Permutation out;
    std::set<std::string> emitted;
    std::vector<char> used(p.size(), 0);
    while (out.size() < p.size()) {
        bool progressed = false;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (used[i]) continue;
            bool ready = true;
            auto it = prec.find(p[i]);
            if (it != prec.end())
                for (const auto& pre : it->second)
                    ready = ready && (!in_perm.count(pre) || emitted.count(pre));
            if (!ready) continue;
            used[i] = 1;
            out.push_back(p[i]);
            emitted.insert(p[i]);
            progressed = true;
            break;
        }
        if (!progressed) return false; // precedence cycle
    }
    p = std::move(out);
    return true;
}

DecodeResult decode(const GameModel& m, const Permutation& p, const SearchConfig& cfg) {
    DecodeResult out;
    State state = initial_search_state(m, cfg);
    std::vector<std::string> steps;
    std::string prev = m.start;
    for (std::size_t pi = 0; pi < p.size(); ++pi) {
        const std::string& target = p[pi];
        int ti = m.node_index.at(target);
        if (state.visited[ti]) {
            out.note = "target '" + target + "' already visited before its turn";
            return out;
        }
        // later targets must keep their place in the order: never enter them early
        std::vector<int> avoid;
        for (std::size_t k = pi + 1; k < p.size(); ++k) avoid.push_back(m.node_index.at(p[k]));
        SegmentResult seg =
            search_segment(m, cfg, state, [&](const State& s) { return s.at == ti; }, avoid);
        if (seg.status != SearchStatus::Found) {
            out.note = "segment '" + prev + "' -> '" + target + "' infeasible";
            return out;
        }
        steps.insert(steps.end(), seg.steps.begin(), seg.steps.end());
        state = seg.end_state;
        prev = target;
    }
    if (!m.ends.count(m.nodes[state.at].id)) {
        SegmentResult seg = search_segment(
            m, cfg, state, [&](const State& s) { return m.ends.count(m.nodes[s.at].id) != 0; });
        if (seg.status != SearchStatus::Found) {
            out.note = "segment '" + prev + "' -> ends infeasible";
            return out;
        }
        steps.insert(steps.end(), seg.steps.begin(), seg.steps.end());
    }
    try {
        out.route = evaluate_route(m, steps);
    } catch (const RouteError& e) {
        out.note = e.what();
        return out;
    }
    out.feasible = true;
    return out;
}

OracleResult brute_force(const GameModel& m, const SearchConfig& cfg, bool full_mode) {
    std::vector<std::string> base = permutation_base(m);
    if (base.size() > 9)
        throw ValidationError("brute_force: too many required events (" + std::to_string(base.size()) +
                              " > 9)");
    OracleResult out;
    if (base.empty()) {
        SegmentResult seg =
            search_segment(m, cfg, initial_search_state(m, cfg),
                           [&](const State& s) { return m.ends.count(m.nodes[s.at].id) != 0; });
        if (seg.status != SearchStatus::Found) return out;
        out.route = evaluate_route(m, seg.steps);
        out.feasible = true;
        return out;
    }
    auto prec = required_precedence(m);
    std::vector<Permutation> perms;
    enumerate_permutations(base, prec, perms, 1000000);
    for (const auto& p : perms) {
        Route candidate;
        bool ok = false;
        if (full_mode) {
            SearchResult r = search_ordered(m, cfg, p);
            ok = r.status == SearchStatus::Found;
            if (ok) candidate = r.route;
        } else {
            DecodeResult d = decode(m, p, cfg);
            ok = d.feasible;
            if (ok) candidate = d.route;
        }
        if (!ok) continue;
        if (!out.feasible || candidate.total_time < out.route.total_time) {
            out.feasible = true;
            out.route = candidate;
            out.best_perm = p;
        }
    }
    return out;
}

SolveResult solve_ga(const GameModel& m, const SolverParams& params, const SearchConfig& cfg) {
    SolveResult out;
    std::vector<std::string> base = permutation_base(m);
    DecodeCache cache{m, cfg, {}};
    if (base.empty()) {
        const DecodeResult& d = cache.get({});
        out.feasible = d.feasible;
        if (d.feasible) out.route = d.route;
        else out.error = d.note;
        out.log.push_back({0, d.feasible ? d.route.total_time.to_double() : 0.0, 0.0, d.feasible ? 1.0 : 0.0});
        return out;
    }
    auto prec = required_precedence(m);
    std::mt19937_64 rng(params.seed);
    int pop_size = std::max(2, params.population);

    std::vector<Permutation> pop;
    std::vector<Fitness> fit;
    auto evaluate = [&]() {
        cache.warm(pop, params.workers);
        fit.assign(pop.size(), {});
        for (std::size_t i = 0; i < pop.size(); ++i) {
            const DecodeResult& d = cache.get(pop[i]);
            fit[i].feasible = d.feasible;
            if (d.feasible) fit[i].time = d.route.total_time;
        }
    };
    auto any_feasible = [&]() {
        for (const auto& f : fit)
            if (f.feasible) return true;
        return false;
    };

    const int max_retries = 20;
    for (int retry = 0;; ++retry) {
        pop.clear();
        for (int i = 0; i < pop_size; ++i) {
            Permutation p = base;
            shuffle_permutation(p, rng);
            if (!repair_permutation(m, prec, p)) {
                out.error = "precedence cycle among required events";
                return out;
            }
            pop.push_back(std::move(p));
        }
        evaluate();
        if (any_feasible()) break;
        out.init_retries = retry + 1;
        if (retry + 1 >= max_retries) {
            out.error = "no feasible individual after " + std::to_string(retry + 1) + " initialization retries";
            return out;
        }
    }

    std::size_t best_idx = 0;
    auto record = [&](int gen) {
        best_idx = 0;
        for (std::size_t i = 1; i < pop.size(); ++i)
            if (fit[i].better_than(fit[best_idx])) best_idx = i;
        double sum = 0;
        int feas = 0;
        for (const auto& f : fit)
            if (f.feasible) {
                sum += f.time.to_double();
                ++feas;
            }
        out.log.push_back({gen, fit[best_idx].feasible ? fit[best_idx].time.to_double()
                                                       : std::numeric_limits<double>::infinity(),
                           feas ? sum / feas : std::numeric_limits<double>::infinity(),
                           static_cast<double>(feas) / pop.size()});
    };
    record(0);

    Permutation all_time_best = pop[best_idx];
    Fitness all_time_fit = fit[best_idx];

    auto tournament = [&]() -> std::size_t {
        std::size_t best = rand_index(rng, pop.size());
        for (int k = 1; k < 3; ++k) {
            std::size_t cand = rand_index(rng, pop.size());
            if (fit[cand].better_than(fit[best])) best = cand;
        }
        return best;
    };

    for (int gen = 1; gen <= params.generations; ++gen) {
        std::vector<std::size_t> order(pop.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (fit[a].better_than(fit[b])) return true;
            if (fit[b].better_than(fit[a])) return false;
            return a < b;
        });
        std::vector<Permutation> next;
        for (int e = 0; e < params.elitism && e < static_cast<int>(order.size()); ++e)
            next.push_back(pop[order[e]]);
        while (static_cast<int>(next.size()) < pop_size) {
            const Permutation& p1 = pop[tournament()];
            const Permutation& p2 = pop[tournament()];
            Permutation child = rand_unit(rng) < params.crossover_rate ? ox1_crossover(p1, p2, rng) : p1;
            mutate_permutation(child, params.mutation_rate, rng);
            if (!repair_permutation(m, prec, child)) child = p1;
            next.push_back(std::move(child));
        }
        pop = std::move(next);
        evaluate();
        record(gen);
        if (fit[best_idx].better_than(all_time_fit)) {
            all_time_fit = fit[best_idx];
            all_time_best = pop[best_idx];
        }
    }

    out.feasible = all_time_fit.feasible;
    if (out.feasible) {
        out.route = cache.get(all_time_best).route;
        out.best_perm = all_time_best;
    } else {
        out.error = "no feasible route found";
    }
    return out;
}

SolveResult solve_aco(const GameModel& m, const SolverParams& params, const SearchConfig& cfg) {
    SolveResult out;
    std::vector<std::string> base = permutation_base(m);
    DecodeCache cache{m, cfg, {}};
    if (base.empty()) {
        const DecodeResult& d = cache.get({});
        out.feasible = d.feasible;
        if (d.feasible) out.route = d.route;
        else out.error = d.note;
        out.log.push_back({0, d.feasible ? d.route.total_time.to_double() : 0.0, 0.0, d.feasible ? 1.0 : 0.0});
        return out;
    }
    auto prec = required_precedence(m);
    std::mt19937_64 rng(params.seed);

    // static heuristic: base-weight shortest path times, ignoring dynamics
    std::size_t n = base.size();
    std::vector<std::string> points;
    points.push_back(m.start);
    points.insert(points.end(), base.begin(), base.end());
    auto sssp = [&](const std::string& src) {
        std::vector<double> dist(m.nodes.size(), std::numeric_limits<double>::infinity());
        using QI = std::pair<double, int>;
        std::priority_queue<QI, std::vector<QI>, std::greater<QI>> pq;
        int s = m.node_index.at(src);
        dist[s] = 0;
        pq.push({0, s});
        while (!pq.empty()) {
            auto [d, u] = pq.top();
            pq.pop();
            if (d > dist[u]) continue;
            for (int ei : m.out_edges[u]) {
                int v = m.node_index.at(m.edges[ei].to);
                double nd = d + m.edges[ei].base.time.to_double();
                if (nd < dist[v]) {
                    dist[v] = nd;
                    pq.push({nd, v});
                }
            }
        }
        return dist;
    };
    std::vector<std::vector<double>> eta(points.size(), std::vector<double>(n, 1e-6));
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto dist = sssp(points[i]);
        for (std::size_t j = 0; j < n; ++j) {
            double d = dist[m.node_index.at(base[j])];
            if (std::isfinite(d)) eta[i][j] = 1.0 / std::max(d, 1e-6);
        }
    }
    auto point_index = [&](const std::string& id) -> std::size_t {
        for (std::size_t i = 0; i < points.size(); ++i)
            if (points[i] == id) return i;
        return 0;
    };

    std::vector<std::vector<double>> tau(points.size(), std::vector<double>(n, 1.0));
    Permutation global_best;
    Fitness global_fit;
    bool any_ant_feasible = false;

    for (int iter = 0; iter < std::max(1, params.aco.iterations); ++iter) {
        std::vector<Permutation> ants;
        for (int a = 0; a < std::max(1, params.aco.ants); ++a) {
            Permutation perm;
            std::set<std::string> chosen;
            std::size_t cur = 0; // start point
            while (perm.size() < n) {
                std::vector<std::size_t> cands;
                for (std::size_t j = 0; j < n; ++j) {
                    if (chosen.count(base[j])) continue;
                    bool ok = true;
                    auto it = prec.find(base[j]);
                    if (it != prec.end())
                        for (const auto& pre : it->second)
                            ok = ok && (chosen.count(pre) ||
                                        !std::count(base.begin(), base.end(), pre));
                    if (ok) cands.push_back(j);
                }
                if (cands.empty()) break; // precedence cycle
                std::vector<double> w(cands.size());
                double total = 0;
                for (std::size_t c = 0; c < cands.size(); ++c) {
                    w[c] = std::pow(tau[cur][cands[c]], params.aco.alpha) *
                           std::pow(eta[cur][cands[c]], params.aco.beta);
                    total += w[c];
                }
                std::size_t pick = cands.size() - 1;
                if (total > 0) {
                    double r = rand_unit(rng) * total;
                    double acc = 0;
                    for (std::size_t c = 0; c < cands.size(); ++c) {
                        acc += w[c];
                        if (r < acc) {
                            pick = c;
                            break;
                        }
                    }
                } else {
                    pick = rand_index(rng, cands.size());
                }
                const std::string& gene = base[cands[pick]];
                perm.push_back(gene);
                chosen.insert(gene);
                cur = point_index(gene);
            }
            if (perm.size() == n) ants.push_back(std::move(perm));
        }
        if (ants.empty()) {
            out.error = "precedence cycle among required events";
            return out;
        }
        cache.warm(ants, params.workers);
        int best_ant = -1;
        Fitness best_fit;
        double sum = 0;
        int feas = 0;
        for (std::size_t a = 0; a < ants.size(); ++a) {
            const DecodeResult& d = cache.get(ants[a]);
            Fitness f;
            f.feasible = d.feasible;
            if (d.feasible) {
                f.time = d.route.total_time;
                sum += f.time.to_double();
                ++feas;
                any_ant_feasible = true;
            }
            if (best_ant < 0 || f.better_than(best_fit)) {
                best_ant = static_cast<int>(a);
                best_fit = f;
            }
        }
        out.log.push_back({iter, best_fit.feasible ? best_fit.time.to_double()
                                                   : std::numeric_limits<double>::infinity(),
                           feas ? sum / feas : std::numeric_limits<double>::infinity(),
                           static_cast<double>(feas) / ants.size()});
        // evaporation, then iteration-best deposit
        for (auto& row : tau)
            for (auto& t : row) t *= (1.0 - params.aco.evaporation);
        if (best_fit.feasible) {
            double deposit = 1.0 / std::max(best_fit.time.to_double(), 1e-9);
            std::size_t cur2 = 0;
            for (const auto& gene : ants[best_ant]) {
                std::size_t j = 0;
                while (base[j] != gene) ++j;
                tau[cur2][j] += deposit;
                cur2 = point_index(gene);
            }
        }
        if (best_fit.better_than(global_fit)) {
            global_fit = best_fit;
            global_best = ants[best_ant];
        }
    }

    if (!any_ant_feasible) {
        out.error = "no feasible route constructed by any ant";
        return out;
    }
    out.feasible = true;
    out.route = cache.get(global_best).route;
    out.best_perm = global_best;
    return out;
}

ParetoFront brute_force_pareto(const GameModel& m, const SearchConfig& cfg) {
    ParetoFront front;
    std::vector<std::string> base = permutation_base(m);
    if (base.size() > 9) throw ValidationError("brute_force_pareto: too many required events");
    auto prec = required_precedence(m);
    std::vector<Permutation> perms;
    if (base.empty()) perms.push_back({});
    else enumerate_permutations(base, prec, perms, 1000000);
    std::vector<int> levels = distinct_difficulty_levels(m, cfg);
    for (const auto& p : perms)
        for (int cap : levels) {
            SearchConfig c = cfg;
            c.difficulty_cap = cap;
            DecodeResult d = decode(m, p, c);
            if (d.feasible) archive_insert(front.routes, d.route);
        }
    sort_front(front.routes);
    return front;
}

ParetoResult solve_pareto(const GameModel& m, const SolverParams& params, const SearchConfig& cfg) {
    ParetoResult out;
    std::vector<std::string> base = permutation_base(m);
    DecodeCache cache{m, cfg, {}};
    auto prec = required_precedence(m);
    std::vector<int> levels = distinct_difficulty_levels(m, cfg);
    std::mt19937_64 rng(params.seed);
    int pop_size = std::max(2, params.population);

    std::vector<Permutation> pop;
    if (base.empty()) {
        pop.push_back({});
    } else {
        // cover every permutation outright when there are few of them
        std::vector<Permutation> all;
        enumerate_permutations(base, prec, all, static_cast<std::size_t>(pop_size) + 1);
        if (static_cast<int>(all.size()) <= pop_size) pop = all;
        while (static_cast<int>(pop.size()) < pop_size) {
            Permutation p = base;
            shuffle_permutation(p, rng);
            if (!repair_permutation(m, prec, p)) {
                out.error = "precedence cycle among required events";
                return out;
            }
            pop.push_back(std::move(p));
        }
    }

    std::vector<Route> archive;
    // genome -> routes at each difficulty level; rank genomes via the pooled fronts
    struct Scored {
        Permutation perm;
        std::vector<Objective> objectives;
        int rank = std::numeric_limits<int>::max();
    };
    auto evaluate_all = [&](std::vector<Permutation>& genomes) -> std::vector<Scored> {
        for (int cap : levels) cache.warm(genomes, params.workers, cap);
        std::vector<Scored> scored;
        for (auto& g : genomes) {
            Scored s;
            s.perm = g;
            for (int cap : levels) {
                const DecodeResult& d = cache.get(g, cap);
                if (d.feasible) {
                    s.objectives.push_back(objective_of(d.route));
                    archive_insert(archive, d.route);
                }
            }
            scored.push_back(std::move(s));
        }
        // non-dominated sorting over the pooled objective points
        std::vector<std::pair<Objective, int>> pool; // (objective, genome index)
        for (std::size_t i = 0; i < scored.size(); ++i)
            for (const auto& o : scored[i].objectives) pool.emplace_back(o, static_cast<int>(i));
        auto dominated = [](const Objective& a, const Objective& b) {
            return (b.time <= a.time && b.difficulty <= a.difficulty) &&
                   (b.time < a.time || b.difficulty < a.difficulty);
        };
        std::vector<int> rank(pool.size(), -1);
        int current = 0;
        std::size_t assigned = 0;
        while (assigned < pool.size()) {
            std::vector<std::size_t> layer;
            for (std::size_t i = 0; i < pool.size(); ++i) {
                if (rank[i] >= 0) continue;
                bool dom = false;
                for (std::size_t j = 0; j < pool.size(); ++j)
                    if (rank[j] < 0 && j != i) dom = dom || dominated(pool[i].first, pool[j].first);
                if (!dom) layer.push_back(i);
            }
            if (layer.empty()) break; // identical points can deadlock the peel; bail out
            for (std::size_t i : layer) rank[i] = current;
            assigned += layer.size();
            ++current;
        }
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (rank[i] >= 0)
                scored[pool[i].second].rank = std::min(scored[pool[i].second].rank, rank[i]);
        return scored;
    };

    std::vector<Scored> scored = evaluate_all(pop);
    for (int gen = 1; gen <= params.generations && !base.empty(); ++gen) {
        auto tournament = [&]() -> const Permutation& {
            std::size_t a = rand_index(rng, scored.size());
            std::size_t b = rand_index(rng, scored.size());
            return scored[a].rank <= scored[b].rank ? scored[a].perm : scored[b].perm;
        };
        std::vector<Permutation> next;
        while (static_cast<int>(next.size()) < pop_size) {
            Permutation child = rand_unit(rng) < params.crossover_rate ? ox1_crossover(tournament(), tournament(), rng)
                                                                       : tournament();
            mutate_permutation(child, params.mutation_rate, rng);
            if (!repair_permutation(m, prec, child)) continue;
            next.push_back(std::move(child));
        }
        pop = std::move(next);
        scored = evaluate_all(pop);
    }

    if (archive.empty()) {
        if (out.error.empty()) out.error = "no feasible route found";
        return out;
    }
    if (static_cast<int>(archive.size()) > params.mo.archive_cap)
        crowding_prune(archive, params.mo.archive_cap);
    sort_front(archive);
    out.feasible = true;
    out.front.routes = std::move(archive);
    return out;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& log) {
    std::ostringstream os;
    os << "generation,best,mean,feasible_fraction\n";
    for (const auto& row : log)
        os << row.generation << ',' << row.best << ',' << row.mean << ',' << row.feasible_fraction << '\n';
    return os.str();
}

} // namespace speedroute
