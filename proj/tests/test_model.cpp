#include "doctest.h"
#include "fixtures.hpp"

using namespace speedroute;

TEST_CASE("loading maps the document onto the model") {
    GameModel m = fixtures::line();
    CHECK(m.nodes.size() == 4);
    CHECK(m.edges.size() == 3);
    CHECK(m.start == "alpha");
    CHECK(m.ends == std::set<std::string>{"omega"});
    CHECK(m.required == std::set<std::string>{"A", "B"});
}

TEST_CASE("validation errors carry the offending path and name") {
    json doc = json::parse(fixtures::kLine);
    doc["edges"][0]["to"] = "X";
    CHECK_THROWS_WITH_AS(load_model(doc), doctest::Contains("'X'"), ValidationError);

    doc = json::parse(fixtures::kLine);
    doc["edges"][1]["time"] = -1;
    CHECK_THROWS_WITH_AS(load_model(doc), doctest::Contains("time ≥ 0"), ValidationError);

    doc = json::parse(fixtures::kLine);
    doc["version"] = "bogus/9";
    CHECK_THROWS_AS(load_model(doc), ValidationError);

    CHECK_THROWS_AS(load_model_text("{nonsense"), ParseError);
}

TEST_CASE("serialization round-trips and hashing is stable") {
    GameModel m = fixtures::gain();
    GameModel again = load_model(model_to_json(m));
    CHECK(model_to_json(m) == model_to_json(again));
    CHECK(model_hash(m) == model_hash(again));
    CHECK(model_hash(m) != model_hash(fixtures::line()));
}

TEST_CASE("reduce keeps start, ends and required nodes only") {
    GameModel r = reduce_model(fixtures::gain());
    CHECK(r.reduced);
    CHECK_FALSE(r.has_node("C"));
    CHECK_FALSE(r.has_edge("aC"));
    CHECK(r.rules.empty()); // the halving rule depended on C
    // every node required -> identity up to the reduced flag
    GameModel line = fixtures::line();
    json all_req = json::parse(fixtures::kLine);
    all_req["required"] = {"A", "B", "omega"};
    GameModel full = load_model(all_req);
    GameModel same = reduce_model(full);
    CHECK(same.nodes.size() == full.nodes.size());
    CHECK(same.edges.size() == full.edges.size());
}

TEST_CASE("reduce drops unreachable optional nodes and flags infeasibility") {
    json doc = json::parse(fixtures::kLine);
    doc["nodes"].push_back({{"id", "island"}});
    GameModel r = reduce_model(load_model(doc));
    CHECK_FALSE(r.has_node("island"));

    json broken = json::parse(fixtures::kLine);
    broken["required"] = json::array(); // sever the only path to the end
    broken["edges"].erase(2);
    broken["edges"].erase(1);
    broken["edges"].erase(0);
    broken["edges"].push_back({{"id", "aA2"}, {"from", "alpha"}, {"to", "A"}, {"time", 1}});
    CHECK_THROWS_AS(reduce_model(load_model(broken)), InfeasibleError);
}

TEST_CASE("clustering merges tagged nodes, sums grants, dedups edges") {
    GameModel c = cluster_nodes(fixtures::cluster());
    CHECK(c.nodes.size() == 3);
    CHECK(c.has_node("X1"));
    CHECK_FALSE(c.has_node("X2"));
    // parallel alpha->X and X->omega pairs collapse to the cheaper edge each
    CHECK(c.edges.size() == 2);
    SearchResult r = expand_and_search(c, SearchConfig{});
    REQUIRE(r.status == SearchStatus::Found);
    CHECK(r.route.total_time == Rational(3));

    json doc = json::parse(fixtures::kCluster);
    doc["nodes"][2]["grants"] = json::object();
    doc["nodes"][3]["grants"] = json::object();
    doc["resources"] = {{{"id", "bomb"}, {"initial", 0}}};
    doc["nodes"][2]["grants"]["bomb"] = 2;
    doc["nodes"][3]["grants"]["bomb"] = 3;
    GameModel g = cluster_nodes(load_model(doc));
    REQUIRE(g.node("X1").grants.size() == 1);
    CHECK(g.node("X1").grants[0].second == 5);
}

TEST_CASE("cluster of one node is the identity; required wins over optional") {
    json doc = json::parse(fixtures::kLine);
    doc["nodes"][1]["cluster_tag"] = "solo";
    GameModel c = cluster_nodes(load_model(doc));
    CHECK(c.nodes.size() == 4);
    CHECK(c.edges.size() == 3);

    json merged = json::parse(fixtures::kCluster);
    merged["required"] = {"X2"};
    GameModel m = cluster_nodes(load_model(merged));
    CHECK(m.required == std::set<std::string>{"X1"}); // merged id, still required
}

TEST_CASE("cluster containing start and an end is rejected") {
    json doc = json::parse(fixtures::kCluster);
    doc["nodes"][0]["cluster_tag"] = "bad";
    doc["nodes"][1]["cluster_tag"] = "bad";
    CHECK_THROWS_AS(cluster_nodes(load_model(doc)), ValidationError);
}

TEST_CASE("apply_ruleset filters banned tags and detects infeasibility") {
    json doc = json::parse(fixtures::kLine);
    doc["edges"].push_back({{"id", "zip"}, {"from", "alpha"}, {"to", "omega"},
                            {"time", 1}, {"tags", {"glitch"}}});
    GameModel m = load_model(doc);
    GameModel filtered = apply_ruleset(m, {"glitch"});
    CHECK(filtered.edges.size() == m.edges.size() - 1);
    CHECK(apply_ruleset(m, {}).edges.size() == m.edges.size());

    // banning "walk" severs the only way to required node B
    json gate = json::parse(fixtures::kLine);
    gate["edges"][1]["tags"] = {"walk"};
    CHECK_THROWS_WITH_AS(apply_ruleset(load_model(gate), {"walk"}), doctest::Contains("'B'"),
                         InfeasibleError);
}

TEST_CASE("resolve_weight applies matching rules in priority then id order") {
    GameModel m = fixtures::gain();
    EvalState s = initial_eval_state(m);
    // C not done: base weights untouched
    CHECK(resolve_weight(m, "CA", s).time == Rational(2));
    s.visited[m.node_index.at("C")] = 1;
    CHECK(resolve_weight(m, "CA", s).time == Rational(1));

    auto with_rules = [&](int set_prio, int mul_prio) {
        json doc = json::parse(fixtures::kLine);
        doc["rules"] = {{{"id", "r_set"}, {"priority", set_prio}, {"edges", {"aA"}},
                         {"component", "time"}, {"effect", {{"set", 10}}}},
                        {{"id", "r_mul"}, {"priority", mul_prio}, {"edges", {"aA"}},
                         {"component", "time"}, {"effect", {{"multiply", 0.5}}}}};
        GameModel lm = load_model(doc);
        return resolve_weight(lm, "aA", initial_eval_state(lm)).time;
    };
    CHECK(with_rules(1, 2) == Rational(5));  // set 10, then halve
    CHECK(with_rules(2, 1) == Rational(10)); // halve, then set overrides
}

TEST_CASE("difficulty rounds half up and clamps to 0..10") {
    json doc = json::parse(fixtures::kLine);
    doc["edges"][0]["difficulty"] = 3;
    doc["rules"] = {{{"id", "hard"}, {"edges", {"aA"}}, {"component", "difficulty"},
                     {"effect", {{"multiply", "3/2"}}}}};
    GameModel m = load_model(doc);
    CHECK(resolve_weight(m, "aA", initial_eval_state(m)).difficulty == 5); // 4.5 -> 5

    doc["rules"][0]["effect"] = {{"add", 100}};
    GameModel capped = load_model(doc);
    CHECK(resolve_weight(capped, "aA", initial_eval_state(capped)).difficulty == 10);
}

TEST_CASE("time clamps at zero after each effect") {
    json doc = json::parse(fixtures::kLine);
    doc["rules"] = {{{"id", "neg"}, {"edges", {"aA"}}, {"component", "time"},
                     {"effect", {{"add", -100}}}}};
    GameModel m = load_model(doc);
    CHECK(resolve_weight(m, "aA", initial_eval_state(m)).time == Rational(0));
}

TEST_CASE("evaluate_route walks the chain and reports exact totals") {
    GameModel m = fixtures::line();
    Route r = evaluate_route(m, {"aA", "AB", "Bw"});
    CHECK(r.total_time == Rational(9));
    CHECK(r.covered.count("A"));
    CHECK(r.covered.count("B"));

    Route gain = evaluate_route(fixtures::gain(), {"aC", "CA", "AB", "Bw"});
    CHECK(gain.total_time == Rational(7, 2));
}

TEST_CASE("evaluate_route rejects bad walks") {
    GameModel m = fixtures::resource();
    CHECK_THROWS_WITH_AS(evaluate_route(m, {"aA", "AB", "Bw"}), doctest::Contains("bomb"),
                         RouteError);
    CHECK_THROWS_AS(evaluate_route(fixtures::line(), {"AB"}), RouteError); // broken chain
    CHECK_THROWS_AS(evaluate_route(fixtures::line(), {"aA", "AB"}), RouteError); // off-end
}

TEST_CASE("clock rules see the in-game time") {
    GameModel m = fixtures::clock_model();
    // clock is 3 when Aw is taken: the night surcharge applies
    CHECK(evaluate_route(m, {"aA", "Aw"}).total_time == Rational(10));
    json doc = json::parse(fixtures::kClock);
    doc["rules"][0]["condition"]["clock"] = {{"from", 5}, {"to", 10}};
    CHECK(evaluate_route(load_model(doc), {"aA", "Aw"}).total_time == Rational(5));
}

TEST_CASE("grants fire once for non-repeatable nodes and clamp at the cap") {
    json doc = json::parse(fixtures::kResource);
    doc["edges"].push_back({{"id", "BC"}, {"from", "B"}, {"to", "C"}, {"time", 1}});
    doc["edges"].push_back({{"id", "CB2"}, {"from", "C"}, {"to", "B"}, {"time", 1}});
    GameModel m = load_model(doc);
    // C visited twice but grants only once: second Bw-style spend impossible
    auto violations = validate_route(m, {"aA", "AC", "CB", "BC", "CB2", "Bw"});
    CHECK(violations.empty()); // bomb granted once, spent once
}

TEST_CASE("validate_route accumulates every violation") {
    GameModel m = fixtures::line();
    CHECK(validate_route(m, {"aA", "AB", "Bw"}).empty());
    auto off_end = validate_route(m, {"aA", "AB"});
    REQUIRE(off_end.size() == 1);
    CHECK(off_end[0].find("end") != std::string::npos);

    // skip required B and come up short on a bomb: two findings
    GameModel res = fixtures::resource();
    json doc = json::parse(fixtures::kResource);
    doc["edges"].push_back({{"id", "Aw2"}, {"from", "A"}, {"to", "omega"},
                            {"time", 1}, {"requires", {{"bomb", 1}}}});
    GameModel res2 = load_model(doc);
    auto both = validate_route(res2, {"aA", "Aw2"});
    CHECK(both.size() == 2);
}

TEST_CASE("route documents round-trip with the model hash") {
    GameModel m = fixtures::line();
    Route r = evaluate_route(m, {"aA", "AB", "Bw"});
    json doc = route_to_json(m, r);
    std::string hash;
    auto steps = route_steps_from_json(doc, &hash);
    CHECK(steps == std::vector<std::string>{"aA", "AB", "Bw"});
    CHECK(hash == model_hash(m));
    Route again = evaluate_route(m, steps);
    CHECK(again.total_time == r.total_time);
}

TEST_CASE("dot export names every node and edge") {
    std::string dot = export_dot(fixtures::line());
    CHECK(dot.find("\"alpha\"") != std::string::npos);
    CHECK(dot.find("\"A\" -> \"B\"") != std::string::npos);
    CHECK(dot.find("Bw") != std::string::npos);
}
