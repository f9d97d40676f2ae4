#include "doctest.h"
#include "fixtures.hpp"

using namespace speedroute;

namespace {

SearchConfig cap0() {
    SearchConfig cfg;
    cfg.repeat_cap = 0;
    return cfg;
}

} // namespace

TEST_CASE("decode stitches the walk for a given order") {
    DecodeResult ab = decode(fixtures::swap(), {"A", "B"}, cap0());
    REQUIRE(ab.feasible);
    CHECK(ab.route.total_time == Rational(5));
    // closing segment shortcuts back through B: 5 + 1 + (1 + 2)
    DecodeResult ba = decode(fixtures::swap(), {"B", "A"}, cap0());
    REQUIRE(ba.feasible);
    CHECK(ba.route.total_time == Rational(9));
}

TEST_CASE("decode is infeasible when the order contradicts the graph") {
    DecodeResult d = decode(fixtures::line(), {"B", "A"}, cap0());
    CHECK_FALSE(d.feasible);
    CHECK(d.note.find("B") != std::string::npos);
}

TEST_CASE("decode picks up non-required waypoints when they pay off") {
    DecodeResult d = decode(fixtures::gain(), {"A", "B"}, cap0());
    REQUIRE(d.feasible);
    CHECK(d.route.total_time == Rational(7, 2));
    CHECK(d.route.covered.count("C"));
}

TEST_CASE("precedence is derived from unanimous edge preconditions") {
    json doc = json::parse(fixtures::kSwap);
    doc["edges"][1]["preconditions"] = {"A"}; // alpha -> B needs A
    doc["edges"][2]["preconditions"] = {"A"}; // A -> B needs A (trivially true)
    GameModel m = load_model(doc);
    auto prec = required_precedence(m);
    REQUIRE(prec.count("B"));
    CHECK(prec["B"] == std::set<std::string>{"A"});
    CHECK_FALSE(prec.count("A"));

    Permutation p{"B", "A"};
    CHECK(repair_permutation(m, prec, p));
    CHECK(p == Permutation{"A", "B"});
    Permutation ok{"A", "B"};
    CHECK(repair_permutation(m, prec, ok));
    CHECK(ok == Permutation{"A", "B"}); // already valid orders are untouched
}

TEST_CASE("repair reports precedence cycles") {
    json doc = json::parse(fixtures::kSwap);
    doc["edges"][0]["preconditions"] = {"B"};
    doc["edges"][3]["preconditions"] = {"B"};
    doc["edges"][1]["preconditions"] = {"A"};
    doc["edges"][2]["preconditions"] = {"A"};
    GameModel m = load_model(doc);
    auto prec = required_precedence(m);
    Permutation p{"A", "B"};
    CHECK_FALSE(repair_permutation(m, prec, p));
}

TEST_CASE("brute force agrees with hand enumeration") {
    OracleResult swap = brute_force(fixtures::swap(), cap0());
    REQUIRE(swap.feasible);
    CHECK(swap.route.total_time == Rational(5));
    CHECK(swap.best_perm == Permutation{"A", "B"});

    OracleResult gain = brute_force(fixtures::gain(), cap0());
    REQUIRE(gain.feasible);
    CHECK(gain.route.total_time == Rational(7, 2));

    OracleResult full = brute_force(fixtures::gain(), cap0(), true);
    REQUIRE(full.feasible);
    CHECK(full.route.total_time == Rational(7, 2));
}

TEST_CASE("brute force handles the degenerate shapes") {
    GameModel m = load_model_text(R"({
      "version": "speedroute-model/1", "start": "alpha", "ends": ["omega"],
      "required": ["alpha"],
      "nodes": [{"id": "alpha"}, {"id": "omega"}],
      "edges": [{"id": "aw", "from": "alpha", "to": "omega", "time": 4}]})");
    OracleResult r = brute_force(m, cap0());
    REQUIRE(r.feasible);
    CHECK(r.route.steps.size() == 1);
    CHECK(r.route.total_time == Rational(4));

    json big = json::parse(fixtures::kLine);
    for (int i = 0; i < 10; ++i) {
        std::string id = "r" + std::to_string(i);
        big["nodes"].push_back({{"id", id}});
        big["edges"].push_back({{"id", "e" + id}, {"from", "alpha"}, {"to", id}, {"time", 1}});
        big["required"].push_back(id);
    }
    CHECK_THROWS_AS(brute_force(load_model(big), cap0()), ValidationError);
}

TEST_CASE("ga matches the oracle on small instances for every panel seed") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 42ull, 1337ull}) {
        SolverParams p;
        p.seed = seed;
        p.generations = 30;
        SolveResult r = solve_ga(fixtures::swap(), p, cap0());
        REQUIRE(r.feasible);
        CHECK(r.route.total_time == Rational(5));
    }
}

TEST_CASE("ga with zero generations still returns the best initial individual") {
    SolverParams p;
    p.population = 2;
    p.generations = 0;
    SolveResult r = solve_ga(fixtures::line(), p, cap0());
    REQUIRE(r.feasible);
    CHECK(r.route.total_time == Rational(9));
    CHECK(r.log.size() == 1);
}

TEST_CASE("ga is deterministic under the seed") {
    SolverParams p;
    p.seed = 7;
    p.generations = 25;
    SolveResult a = solve_ga(fixtures::gain(), p, cap0());
    SolveResult b = solve_ga(fixtures::gain(), p, cap0());
    REQUIRE(a.feasible);
    CHECK(convergence_csv(a.log) == convergence_csv(b.log));
    CHECK(a.best_perm == b.best_perm);
    CHECK(a.route.total_time == b.route.total_time);
}

TEST_CASE("ga reports infeasibility with the retry count") {
    json doc = json::parse(fixtures::kLine);
    doc["edges"].erase(2); // omega unreachable
    SolverParams p;
    p.generations = 1;
    SolveResult r = solve_ga(load_model(doc), p, cap0());
    CHECK_FALSE(r.feasible);
    CHECK(r.error.find("retries") != std::string::npos);
    CHECK(r.init_retries == 20);
}

TEST_CASE("aco matches the oracle and is seed-deterministic") {
    SolverParams p;
    p.seed = 11;
    p.aco.iterations = 20;
    SolveResult a = solve_aco(fixtures::swap(), p, cap0());
    REQUIRE(a.feasible);
    CHECK(a.route.total_time == Rational(5));
    SolveResult b = solve_aco(fixtures::swap(), p, cap0());
    CHECK(convergence_csv(a.log) == convergence_csv(b.log));
    CHECK(a.route.total_time == b.route.total_time);
}

TEST_CASE("aco stays feasible with full evaporation") {
    SolverParams p;
    p.aco.evaporation = 1.0;
    p.aco.iterations = 5;
    SolveResult r = solve_aco(fixtures::swap(), p, cap0());
    REQUIRE(r.feasible);
    CHECK(r.route.total_time == Rational(5));
}

TEST_CASE("solver routes re-evaluate to their recorded totals") {
    GameModel m = fixtures::gain();
    SolverParams p;
    p.generations = 20;
    SolveResult r = solve_ga(m, p, cap0());
    REQUIRE(r.feasible);
    std::vector<std::string> steps;
    for (const auto& s : r.route.steps) steps.push_back(m.edges[s.edge].id);
    Route again = evaluate_route(m, steps);
    CHECK(again.total_time == r.route.total_time);
    CHECK(again.max_difficulty == r.route.max_difficulty);
}

TEST_CASE("pareto front matches hand enumeration on the two-speed instance") {
    SolverParams p;
    p.generations = 10;
    ParetoResult r = solve_pareto(fixtures::mo(), p, cap0());
    REQUIRE(r.feasible);
    REQUIRE(r.front.routes.size() == 2);
    CHECK(r.front.routes[0].total_time == Rational(5));
    CHECK(r.front.routes[0].max_difficulty == 9);
    CHECK(r.front.routes[1].total_time == Rational(7));
    CHECK(r.front.routes[1].max_difficulty == 2);

    ParetoFront oracle = brute_force_pareto(fixtures::mo(), cap0());
    REQUIRE(oracle.routes.size() == 2);
    CHECK(oracle.routes[0].total_time == Rational(5));
    CHECK(oracle.routes[1].total_time == Rational(7));
}

TEST_CASE("pareto degenerates to the scalar optimum without difficulty spread") {
    SolverParams p;
    p.generations = 10;
    ParetoResult r = solve_pareto(fixtures::swap(), p, cap0());
    REQUIRE(r.feasible);
    REQUIRE(r.front.routes.size() == 1);
    CHECK(r.front.routes[0].total_time == Rational(5));
}

TEST_CASE("pareto fronts contain no dominated pair") {
    SolverParams p;
    p.generations = 15;
    ParetoResult r = solve_pareto(fixtures::mo(), p, cap0());
    REQUIRE(r.feasible);
    for (std::size_t i = 0; i < r.front.routes.size(); ++i)
        for (std::size_t j = 0; j < r.front.routes.size(); ++j)
            if (i != j) CHECK_FALSE(dominates(r.front.routes[i], r.front.routes[j]));
}

TEST_CASE("variation operators preserve the permutation property") {
    std::mt19937_64 rng(5);
    Permutation base{"a", "b", "c", "d", "e", "f"};
    for (int i = 0; i < 200; ++i) {
        Permutation a = base, b = base;
        shuffle_permutation(a, rng);
        shuffle_permutation(b, rng);
        Permutation child = ox1_crossover(a, b, rng);
        mutate_permutation(child, 0.5, rng);
        Permutation sorted = child;
        std::sort(sorted.begin(), sorted.end());
        CHECK(sorted == base);
    }
}

TEST_CASE("convergence csv shape") {
    std::string csv = convergence_csv({{0, 5.0, 6.5, 1.0}, {1, 5.0, 5.5, 1.0}});
    CHECK(csv.rfind("generation,best,mean,feasible_fraction\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
