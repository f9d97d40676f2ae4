#include "speedroute/gen.hpp"

#include <algorithm>
#include <cstdio>

namespace speedroute {

namespace {

long long uniform_in(std::mt19937_64& rng, long long lo, long long hi) {
    return lo + static_cast<long long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

std::string pad2(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d", i);
    return buf;
}

GameModel gen_checkpoint_tsp(const GenSpec& spec, std::mt19937_64& rng) {
    GameModel m;
    int n = spec.nodes;
    for (int i = 0; i < n; ++i) m.nodes.push_back(EventNode{"c" + pad2(i), false, {}, std::nullopt, {}});
    m.start = m.nodes[0].id;
    for (int i = 1; i < n; ++i) {
        m.required.insert(m.nodes[i].id);
        m.ends.insert(m.nodes[i].id);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            Edge e;
            e.id = "e" + pad2(i) + pad2(j);
            e.from = m.nodes[i].id;
            e.to = m.nodes[j].id;
            e.base.time = Rational(uniform_in(rng, 1, 100));
            e.base.difficulty = static_cast<int>(uniform_in(rng, 0, 10));
            m.edges.push_back(std::move(e));
        }
    m.finalize();
    return m;
}

GameModel gen_resource_gated(const GenSpec& spec, std::mt19937_64& rng) {
    GameModel m;
    int n = spec.nodes;
    int nres = std::clamp(spec.resources, 1, 3);
    for (int i = 0; i < n; ++i) m.nodes.push_back(EventNode{"v" + pad2(i), false, {}, std::nullopt, {}});
    m.start = m.nodes[0].id;
    m.ends.insert(m.nodes[n - 1].id);

    for (int r = 0; r < nres; ++r) {
        ResourceDef def;
        def.id = "res" + std::to_string(r);
        def.initial = 0;
        def.cap = uniform_in(rng, 3, 8);
        m.resources.push_back(std::move(def));
    }

    // required events somewhere strictly inside the chain
    std::vector<int> interior;
    for (int i = 1; i < n - 1; ++i) interior.push_back(i);
    for (int k = 0; k < spec.required && !interior.empty(); ++k) {
        std::size_t pick = rand_index(rng, interior.size());
        m.required.insert(m.nodes[interior[pick]].id);
        interior.erase(interior.begin() + pick);
    }

    // grant nodes: one or two per resource, occasionally repeatable
    for (int r = 0; r < nres; ++r) {
        int count = static_cast<int>(uniform_in(rng, 1, 2));
        for (int k = 0; k < count; ++k) {
            int ni = static_cast<int>(uniform_in(rng, 1, n - 2));
            EventNode& node = m.nodes[ni];
            node.grants.emplace_back(m.resources[r].id, uniform_in(rng, 1, 3));
            if (!m.required.count(node.id) && uniform_in(rng, 0, 9) < 2) node.repeatable = true;
        }
    }
    for (auto& node : m.nodes) { // merge duplicate grants of the same resource
        std::map<std::string, long long> sum;
        for (const auto& [rid, d] : node.grants) sum[rid] += d;
        node.grants.assign(sum.begin(), sum.end());
    }

    auto add_edge = [&](const std::string& id, int a, int b) {
        Edge e;
        e.id = id;
        e.from = m.nodes[a].id;
        e.to = m.nodes[b].id;
        e.base.time = Rational(uniform_in(rng, 1, 100));
        e.base.difficulty = static_cast<int>(uniform_in(rng, 0, 10));
        if (uniform_in(rng, 0, 4) == 0) e.base.hidden_gain = Rational(uniform_in(rng, 1, 20));
        e.tags = {"move"};
        m.edges.push_back(std::move(e));
    };
    for (int i = 0; i + 1 < n; ++i) add_edge("f" + pad2(i), i, i + 1);
    for (int i = 0; i + 1 < n; ++i) add_edge("b" + pad2(i), i + 1, i);
    for (int k = 0; k < n; ++k) {
        int a = static_cast<int>(uniform_in(rng, 0, n - 1));
        int b = static_cast<int>(uniform_in(rng, 0, n - 1));
        if (a == b) continue;
        add_edge("x" + pad2(k), a, b);
    }

    // a few resource-gated edges
    int gated = static_cast<int>(uniform_in(rng, 1, std::max(1, nres)));
    for (int k = 0; k < gated; ++k) {
        Edge& e = m.edges[rand_index(rng, m.edges.size())];
        const std::string rid = m.resources[rand_index(rng, m.resources.size())].id;
        bool already = false;
        for (const auto& [id, amt] : e.requires_) already = already || id == rid;
        if (!already) e.requires_.emplace_back(rid, 1);
        std::sort(e.requires_.begin(), e.requires_.end());
    }

    // hidden-gain discounts: visiting a node speeds up later movement
    for (int k = 0; k < spec.rules; ++k) {
        WeightRule r;
        r.id = "disc" + std::to_string(k);
        r.priority = k;
        auto cond = std::make_shared<Condition>();
        cond->kind = Condition::Kind::Done;
        cond->id = m.nodes[uniform_in(rng, 1, n - 1)].id;
        r.condition = cond;
        r.edge_tag = "move";
        r.component = WeightComponent::Time;
        r.effect = EffectKind::Multiply;
        r.value = Rational(uniform_in(rng, 3, 9), 10);
        m.rules.push_back(std::move(r));
    }

    m.finalize();
    return m;
}

StageModel gen_stage_save(const GenSpec& spec, std::mt19937_64& rng) {
    StageModel sm;
    int n = spec.nodes;
    for (int i = 0; i < n; ++i) {
        Stage s;
        s.id = "S" + pad2(i);
        // base chosen above the worst-case save sum so times stay positive
        s.base_time = Rational(uniform_in(rng, 30, 60));
        sm.stages.push_back(std::move(s));
    }
    for (int i = 0; i < n; ++i) {
        int nevents = static_cast<int>(uniform_in(rng, 0, 3));
        for (int k = 0; k < nevents; ++k) {
            StageEvent ev;
            ev.id = "s" + std::to_string(k);
            int nsaves = static_cast<int>(uniform_in(rng, 1, std::min(3, n - 1)));
            for (int t = 0; t < nsaves; ++t) {
                int other = static_cast<int>(uniform_in(rng, 0, n - 1));
                if (other == i) continue;
                ev.saves[sm.stages[other].id] = uniform_in(rng, 1, 8);
            }
            sm.stages[i].events.push_back(std::move(ev));
        }
    }
    return sm;
}

} // namespace

GenFamily gen_family_from_string(const std::string& name) {
    if (name == "checkpoint-tsp") return GenFamily::CheckpointTsp;
    if (name == "stage-save") return GenFamily::StageSave;
    if (name == "resource-gated") return GenFamily::ResourceGated;
    throw ValidationError("unknown generator family '" + name + "'");
}

Generated generate(const GenSpec& spec) {
    if (spec.nodes < 2) throw ValidationError("generator needs at least 2 nodes");
    if (spec.family == GenFamily::ResourceGated && spec.nodes < 3)
        throw ValidationError("resource-gated: needs at least 3 nodes");
    if (spec.family == GenFamily::ResourceGated && spec.required > spec.nodes - 2)
        throw ValidationError("resource-gated: required count must be ≤ nodes - 2");

    const int max_retries = 100;
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        std::mt19937_64 rng(spec.seed * 1000003ull + static_cast<std::uint64_t>(attempt));
        Generated out;
        if (spec.family == GenFamily::StageSave) {
            StageModel sm = gen_stage_save(spec, rng);
            out.document = stage_model_to_json(sm);
            out.stage_model = load_stage_model(out.document); // self-check: validates
            return out;
        }
        GameModel m = spec.family == GenFamily::CheckpointTsp ? gen_checkpoint_tsp(spec, rng)
                                                              : gen_resource_gated(spec, rng);
        out.document = model_to_json(m);
        GameModel loaded = load_model(out.document); // self-check: validates
        SearchConfig cfg;
        cfg.repeat_cap = 0;
        cfg.state_budget = 500000;
        SearchResult sr = expand_and_search(loaded, cfg);
        if (sr.status != SearchStatus::Found) continue; // infeasible draw, next sub-seed
        out.model = std::move(loaded);
        return out;
    }
    throw InfeasibleError("generator produced no feasible instance within 100 retries");
}

} // namespace speedroute
