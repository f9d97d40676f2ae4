#include "speedroute/timesave.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace speedroute {

namespace {

constexpr const char* kStageVersion = "speedroute-stages/1";

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ValidationError(path + ": " + msg);
}

} // namespace

const Stage& StageModel::stage(const std::string& id) const {
    for (const auto& s : stages)
        if (s.id == id) return s;
    throw ValidationError("unknown stage '" + id + "'");
}

bool StageModel::has_stage(const std::string& id) const {
    for (const auto& s : stages)
        if (s.id == id) return true;
    return false;
}

StageModel load_stage_model(const json& doc) {
    if (!doc.is_object()) throw ParseError("stage document must be a JSON object");
    if (!doc.contains("version") || doc["version"] != kStageVersion)
        fail("version", std::string("expected \"") + kStageVersion + "\"");
    if (!doc.contains("stages") || !doc["stages"].is_array()) fail("stages", "expected an array");
    StageModel sm;
    for (std::size_t i = 0; i < doc["stages"].size(); ++i) {
        const json& js = doc["stages"][i];
        std::string path = "stages[" + std::to_string(i) + "]";
        Stage s;
        if (!js.contains("id") || !js["id"].is_string()) fail(path + ".id", "expected a string");
        s.id = js["id"].get<std::string>();
        if (sm.has_stage(s.id)) fail(path + ".id", "duplicate stage id '" + s.id + "'");
        if (!js.contains("base_time")) fail(path + ".base_time", "missing");
        const json& bt = js["base_time"];
        s.base_time = bt.is_string() ? Rational::parse(bt.get<std::string>())
                      : bt.is_number_integer() ? Rational(bt.get<long long>())
                                               : rational_from_double(bt.get<double>());
        if (s.base_time.is_negative()) fail(path + ".base_time", "base_time ≥ 0");
        if (js.contains("events")) {
            if (!js["events"].is_array()) fail(path + ".events", "expected an array");
            for (std::size_t k = 0; k < js["events"].size(); ++k) {
                const json& je = js["events"][k];
                std::string epath = path + ".events[" + std::to_string(k) + "]";
                StageEvent ev;
                if (!je.contains("id") || !je["id"].is_string()) fail(epath + ".id", "expected a string");
                ev.id = je["id"].get<std::string>();
                if (je.contains("saves")) {
                    if (!je["saves"].is_object()) fail(epath + ".saves", "expected an object");
                    for (auto it = je["saves"].begin(); it != je["saves"].end(); ++it) {
                        if (!it.value().is_number_integer())
                            fail(epath + ".saves." + it.key(), "saves are integral (s_j : S -> N)");
                        long long v = it.value().get<long long>();
                        if (v < 0) fail(epath + ".saves." + it.key(), "saves ≥ 0");
                        ev.saves[it.key()] = v;
                    }
                }
                s.events.push_back(std::move(ev));
            }
        }
        sm.stages.push_back(std::move(s));
    }
    // save tables may only reference stages of the model
    for (const auto& s : sm.stages)
        for (const auto& ev : s.events)
            for (const auto& [sid, v] : ev.saves)
                if (!sm.has_stage(sid))
                    fail("stages", "event '" + ev.id + "' of '" + s.id + "' references unknown stage '" + sid + "'");
    return sm;
}

StageModel load_stage_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
    return load_stage_model(doc);
}

json stage_model_to_json(const StageModel& sm) {
    json doc;
    doc["version"] = kStageVersion;
    doc["stages"] = json::array();
    for (const auto& s : sm.stages) {
        json js = {{"id", s.id},
                   {"base_time", s.base_time.is_integer() ? json(s.base_time.num()) : json(s.base_time.str())}};
        json evs = json::array();
        for (const auto& ev : s.events) {
            json je = {{"id", ev.id}};
            json saves = json::object();
            for (const auto& [sid, v] : ev.saves) saves[sid] = v;
            je["saves"] = saves;
            evs.push_back(je);
        }
        js["events"] = evs;
        doc["stages"].push_back(js);
    }
    return doc;
}

StageScore score_ordering(const StageModel& sm, const std::vector<std::string>& order) {
    if (order.size() != sm.stages.size())
        throw ValidationError("ordering must contain every stage exactly once");
    std::set<std::string> seen;
    StageScore score;
    score.total_time = Rational(0);
    std::set<std::string> cleared;
    for (const auto& sid : order) {
        if (!sm.has_stage(sid) || !seen.insert(sid).second)
            throw ValidationError("ordering must contain every stage exactly once");
        const Stage& s = sm.stage(sid);
        for (const auto& ev : s.events) {
            long long best = 0;
            for (const auto& [pid, v] : ev.saves)
                if (cleared.count(pid)) best = std::max(best, v);
            score.total_save += best;
        }
        cleared.insert(sid);
    }
    for (const auto& s : sm.stages) score.total_time += s.base_time;
    score.total_time -= Rational(score.total_save);
    return score;
}

StageBest best_ordering(const StageModel& sm, StageSearchMode mode, const SolverParams& params) {
    std::vector<std::string> ids;
    for (const auto& s : sm.stages) ids.push_back(s.id);
    std::sort(ids.begin(), ids.end());
    StageBest best;

    if (mode == StageSearchMode::Exact) {
        if (ids.size() > 10)
            throw ValidationError("exact mode supports at most 10 stages (" + std::to_string(ids.size()) +
                                  " given)");
        std::vector<std::string> perm = ids;
        bool first = true;
        do {
            StageScore score = score_ordering(sm, perm);
            if (first || score.total_save > best.score.total_save) {
                best.order = perm;
                best.score = score;
                first = false;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }

    // GA mode: same operators as the route solvers, fitness = total_save
    std::mt19937_64 rng(params.seed);
    int pop_size = std::max(2, params.population);
    std::vector<std::vector<std::string>> pop;
    for (int i = 0; i < pop_size; ++i) {
        std::vector<std::string> p = ids;
        shuffle_permutation(p, rng);
        pop.push_back(std::move(p));
    }
    auto save_of = [&](const std::vector<std::string>& p) { return score_ordering(sm, p).total_save; };
    std::vector<long long> fit(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) fit[i] = save_of(pop[i]);

    auto best_idx = [&]() {
        std::size_t b = 0;
        for (std::size_t i = 1; i < pop.size(); ++i)
            if (fit[i] > fit[b]) b = i;
        return b;
    };
    best.order = pop[best_idx()];
    best.score = score_ordering(sm, best.order);

    for (int gen = 1; gen <= params.generations; ++gen) {
        auto tournament = [&]() -> const std::vector<std::string>& {
            std::size_t b = rand_index(rng, pop.size());
            for (int k = 1; k < 3; ++k) {
                std::size_t c = rand_index(rng, pop.size());
                if (fit[c] > fit[b]) b = c;
            }
            return pop[b];
        };
        std::vector<std::vector<std::string>> next;
        next.push_back(best.order); // elitism
        while (static_cast<int>(next.size()) < pop_size) {
            std::vector<std::string> child =
                rand_unit(rng) < params.crossover_rate ? ox1_crossover(tournament(), tournament(), rng)
                                                       : tournament();
            mutate_permutation(child, params.mutation_rate, rng);
            next.push_back(std::move(child));
        }
        pop = std::move(next);
        for (std::size_t i = 0; i < pop.size(); ++i) fit[i] = save_of(pop[i]);
        std::size_t b = best_idx();
        if (fit[b] > best.score.total_save) {
            best.order = pop[b];
            best.score = score_ordering(sm, best.order);
        }
    }
    return best;
}

GameModel to_event_graph(const StageModel& sm) {
    GameModel m;
    std::string start_id = "_start";
    while (sm.has_stage(start_id)) start_id += "_";
    m.start = start_id;
    m.nodes.push_back(EventNode{start_id, false, {}, std::nullopt, {}});
    for (const auto& s : sm.stages) {
        m.nodes.push_back(EventNode{s.id, false, {}, std::nullopt, {}});
        m.required.insert(s.id);
        m.ends.insert(s.id);
    }
    auto add_edge = [&](const std::string& from, const std::string& to) {
        Edge e;
        e.id = "e:" + from + ">" + to;
        e.from = from;
        e.to = to;
        e.base.time = sm.stage(to).base_time;
        e.tags = {"to:" + to};
        m.edges.push_back(std::move(e));
    };
    for (const auto& s : sm.stages) add_edge(start_id, s.id);
    for (const auto& a : sm.stages)
        for (const auto& b : sm.stages)
            if (a.id != b.id) add_edge(a.id, b.id);

    // one rule per (stage, event, predecessor): fires only when this
    // predecessor is the event's best cleared alternative
    for (const auto& s : sm.stages) {
        for (std::size_t k = 0; k < s.events.size(); ++k) {
            const StageEvent& ev = s.events[k];
            for (const auto& [pid, v] : ev.saves) {
                if (v <= 0 || pid == s.id) continue;
                auto done = [](const std::string& id) {
                    auto c = std::make_shared<Condition>();
                    c->kind = Condition::Kind::Done;
                    c->id = id;
                    return ConditionPtr(c);
                };
                std::vector<ConditionPtr> better;
                for (const auto& [qid, w] : ev.saves) {
                    if (qid == pid || qid == s.id || w <= 0) continue;
                    if (w > v || (w == v && qid < pid)) better.push_back(done(qid));
                }
                ConditionPtr cond;
                if (better.empty()) {
                    cond = done(pid);
                } else {
                    auto any = std::make_shared<Condition>();
                    any->kind = Condition::Kind::Any;
                    any->children = better;
                    auto neg = std::make_shared<Condition>();
                    neg->kind = Condition::Kind::Not;
                    neg->children = {any};
                    auto all = std::make_shared<Condition>();
                    all->kind = Condition::Kind::All;
                    all->children = {done(pid), neg};
                    cond = all;
                }
                WeightRule r;
                r.id = "sv:" + s.id + ":" + std::to_string(k) + ":" + pid;
                r.priority = 0;
                r.condition = cond;
                r.edge_tag = "to:" + s.id;
                r.component = WeightComponent::Time;
                r.effect = EffectKind::Add;
                r.value = Rational(-v);
                m.rules.push_back(std::move(r));
            }
        }
    }
    m.finalize();
    return m;
}

std::vector<std::string> ordering_walk(const StageModel& sm, const std::vector<std::string>& order) {
    std::vector<std::string> steps;
    std::string start_id = "_start";
    while (sm.has_stage(start_id)) start_id += "_";
    std::string cur = start_id;
    for (const auto& sid : order) {
        steps.push_back("e:" + cur + ">" + sid);
        cur = sid;
    }
    return steps;
}

} // namespace speedroute
