#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "speedroute/gen.hpp"

namespace sr = speedroute;

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw sr::ParseError("cannot write '" + path + "'");
    out << content;
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) std::cout << content << "\n";
    else write_file(out_path, content);
}

std::set<std::string> split_tags(const std::string& csv) {
    std::set<std::string> tags;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) tags.insert(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) tags.insert(cur);
    return tags;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"speedroute: routing over game event graphs with dynamic weights"};
    app.require_subcommand(1);

    std::string model_path, route_path, out_path, log_path, banned, algo = "ga", mode = "greedy";
    std::string stage_mode = "exact", family = "checkpoint-tsp";
    std::uint64_t seed = 0;
    int workers = 1;
    sr::SearchConfig cfg;
    int difficulty_cap = -1;
    sr::SolverParams params;
    sr::GenSpec gspec;
    bool do_reduce = false, do_cluster = false;

    auto add_model_arg = [&](CLI::App* cmd) { cmd->add_option("model", model_path, "model file")->required(); };
    auto add_search_flags = [&](CLI::App* cmd) {
        cmd->add_option("--repeat-cap", cfg.repeat_cap, "max visits of any repeatable node");
        cmd->add_option("--clock-buckets", cfg.clock_buckets, "clock discretization (1 = ignore clock)");
        cmd->add_option("--state-budget", cfg.state_budget, "max expanded states");
        cmd->add_option("--difficulty-cap", difficulty_cap, "drop transitions harder than this");
        cmd->add_option("--banned-tags", banned, "comma-separated edge tags to remove first");
    };
    auto add_solver_flags = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "RNG seed");
        cmd->add_option("--workers", workers, "parallel fitness evaluation threads");
        cmd->add_option("--population", params.population, "GA population size");
        cmd->add_option("--generations", params.generations, "GA generations");
        cmd->add_option("--ants", params.aco.ants, "ACO ants per iteration");
        cmd->add_option("--iterations", params.aco.iterations, "ACO iterations");
        cmd->add_option("--log", log_path, "write convergence CSV here");
    };

    CLI::App* solve = app.add_subcommand("solve", "find a minimum-time route");
    add_model_arg(solve);
    solve->add_option("--algo", algo, "ga | aco | exact");
    add_search_flags(solve);
    add_solver_flags(solve);
    solve->add_option("--out", out_path, "route file to write");

    CLI::App* pareto = app.add_subcommand("pareto", "time/difficulty Pareto front");
    add_model_arg(pareto);
    add_search_flags(pareto);
    add_solver_flags(pareto);
    pareto->add_option("--archive-cap", params.mo.archive_cap, "max front size");
    pareto->add_option("--out", out_path, "front CSV path (route docs written alongside)");

    CLI::App* oracle = app.add_subcommand("oracle", "brute-force permutation oracle");
    add_model_arg(oracle);
    oracle->add_option("--mode", mode, "greedy | full");
    add_search_flags(oracle);
    oracle->add_option("--out", out_path, "route file to write");

    CLI::App* validate = app.add_subcommand("validate", "check a route file against a model");
    add_model_arg(validate);
    validate->add_option("route", route_path, "route file")->required();

    CLI::App* expand = app.add_subcommand("expand", "count reachable states under the caps");
    add_model_arg(expand);
    add_search_flags(expand);

    CLI::App* stages = app.add_subcommand("stages", "best stage ordering for a stage model");
    stages->add_option("model", model_path, "stage model file")->required();
    stages->add_option("--mode", stage_mode, "exact | ga");
    stages->add_option("--seed", seed, "RNG seed");
    stages->add_option("--population", params.population, "GA population size");
    stages->add_option("--generations", params.generations, "GA generations");
    stages->add_option("--out", out_path, "result file to write");

    CLI::App* gen = app.add_subcommand("gen", "emit a synthetic instance");
    gen->add_option("--family", family, "checkpoint-tsp | stage-save | resource-gated");
    gen->add_option("--nodes", gspec.nodes, "node/stage count");
    gen->add_option("--required", gspec.required, "required event count (resource-gated)");
    gen->add_option("--resources", gspec.resources, "resource count (resource-gated)");
    gen->add_option("--rules", gspec.rules, "discount rule count (resource-gated)");
    gen->add_option("--seed", seed, "instance seed");
    gen->add_option("--out", out_path, "model file to write");

    CLI::App* dot = app.add_subcommand("export-dot", "write the event graph as DOT");
    add_model_arg(dot);
    dot->add_option("--out", out_path, "DOT file to write");

    CLI::App* transform = app.add_subcommand("transform", "reduce / cluster / filter a model");
    add_model_arg(transform);
    transform->add_flag("--reduce", do_reduce, "drop optional nodes (may sacrifice optimality)");
    transform->add_flag("--cluster", do_cluster, "merge nodes sharing a cluster_tag");
    transform->add_option("--banned-tags", banned, "comma-separated edge tags to remove");
    transform->add_option("--out", out_path, "model file to write");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    params.seed = seed;
    params.workers = workers;
    if (difficulty_cap >= 0) cfg.difficulty_cap = difficulty_cap;

    try {
        auto load_with_ruleset = [&]() {
            sr::GameModel m = sr::load_model_file(model_path);
            if (!banned.empty()) m = sr::apply_ruleset(m, split_tags(banned));
            return m;
        };

        if (solve->parsed()) {
            sr::GameModel m = load_with_ruleset();
            std::cout << "seed: " << seed << "\n";
            sr::Route route;
            std::vector<sr::ConvergenceRow> log;
            if (algo == "exact") {
                sr::SearchResult r = sr::expand_and_search(m, cfg);
                if (r.status != sr::SearchStatus::Found) {
                    std::cerr << (r.status == sr::SearchStatus::BudgetExhausted
                                      ? "infeasible within caps: state budget exhausted"
                                      : "infeasible: state graph disconnected from every end")
                              << "\n";
                    return 1;
                }
                std::cout << "states expanded: " << r.stats.expanded
                          << ", frontier peak: " << r.stats.frontier_peak << "\n";
                route = r.route;
            } else if (algo == "ga" || algo == "aco") {
                sr::SolveResult r = algo == "ga" ? sr::solve_ga(m, params, cfg) : sr::solve_aco(m, params, cfg);
                if (!log_path.empty()) write_file(log_path, sr::convergence_csv(r.log));
                if (!r.feasible) {
                    std::cerr << "infeasible: " << r.error << "\n";
                    return 1;
                }
                route = r.route;
            } else {
                std::cerr << "unknown --algo '" << algo << "'\n";
                return 2;
            }
            std::cout << "total_time: " << route.total_time.str()
                      << ", max_difficulty: " << route.max_difficulty << "\n";
            emit(out_path, sr::route_to_json(m, route).dump(2));
            return 0;
        }

        if (pareto->parsed()) {
            sr::GameModel m = load_with_ruleset();
            std::cout << "seed: " << seed << "\n";
            sr::ParetoResult r = sr::solve_pareto(m, params, cfg);
            if (!r.feasible) {
                std::cerr << "infeasible: " << r.error << "\n";
                return 1;
            }
            std::string csv = "time,difficulty,route\n";
            for (std::size_t i = 0; i < r.front.routes.size(); ++i) {
                std::string route_file =
                    out_path.empty() ? "" : out_path + "-route-" + std::to_string(i) + ".json";
                csv += r.front.routes[i].total_time.str() + "," +
                       std::to_string(r.front.routes[i].max_difficulty) + "," +
                       (route_file.empty() ? "route-" + std::to_string(i) : route_file) + "\n";
                if (!route_file.empty())
                    write_file(route_file, sr::route_to_json(m, r.front.routes[i]).dump(2));
            }
            emit(out_path, csv);
            std::cout << "front size: " << r.front.routes.size() << "\n";
            return 0;
        }

        if (oracle->parsed()) {
            sr::GameModel m = load_with_ruleset();
            sr::OracleResult r = sr::brute_force(m, cfg, mode == "full");
            if (!r.feasible) {
                std::cerr << "infeasible: no permutation decodes to a route\n";
                return 1;
            }
            std::cout << "total_time: " << r.route.total_time.str()
                      << ", max_difficulty: " << r.route.max_difficulty << "\n";
            emit(out_path, sr::route_to_json(m, r.route).dump(2));
            return 0;
        }

        if (validate->parsed()) {
            sr::GameModel m = sr::load_model_file(model_path);
            std::ifstream in(route_path);
            if (!in) throw sr::ParseError("cannot open '" + route_path + "'");
            sr::json doc = sr::json::parse(in);
            std::string hash;
            std::vector<std::string> steps = sr::route_steps_from_json(doc, &hash);
            std::vector<std::string> violations = sr::validate_route(m, steps);
            if (!hash.empty() && hash != sr::model_hash(m))
                violations.insert(violations.begin(), "route was produced against a different model (hash mismatch)");
            for (const auto& v : violations) std::cout << "violation: " << v << "\n";
            if (violations.empty()) std::cout << "route is feasible\n";
            return violations.empty() ? 0 : 1;
        }

        if (expand->parsed()) {
            sr::GameModel m = load_with_ruleset();
            sr::CountResult r = sr::count_states(m, cfg);
            std::cout << "states: " << r.count << (r.budget_hit ? " (state budget hit, partial count)" : "")
                      << "\n";
            return r.budget_hit ? 1 : 0;
        }

        if (stages->parsed()) {
            sr::StageModel sm = sr::load_stage_model_file(model_path);
            params.seed = seed;
            std::cout << "seed: " << seed << "\n";
            sr::StageBest best = sr::best_ordering(
                sm, stage_mode == "ga" ? sr::StageSearchMode::Ga : sr::StageSearchMode::Exact, params);
            sr::json doc = {{"order", best.order},
                            {"total_time", best.score.total_time.is_integer()
                                               ? sr::json(best.score.total_time.num())
                                               : sr::json(best.score.total_time.str())},
                            {"total_save", best.score.total_save}};
            std::cout << "total_save: " << best.score.total_save
                      << ", total_time: " << best.score.total_time.str() << "\n";
            emit(out_path, doc.dump(2));
            return 0;
        }

        if (gen->parsed()) {
            gspec.family = sr::gen_family_from_string(family);
            gspec.seed = seed;
            std::cout << "seed: " << seed << "\n";
            sr::Generated g = sr::generate(gspec);
            emit(out_path, g.document.dump(2));
            return 0;
        }

        if (dot->parsed()) {
            sr::GameModel m = sr::load_model_file(model_path);
            emit(out_path, sr::export_dot(m));
            return 0;
        }

        if (transform->parsed()) {
            sr::GameModel m = sr::load_model_file(model_path);
            if (!banned.empty()) m = sr::apply_ruleset(m, split_tags(banned));
            if (do_cluster) m = sr::cluster_nodes(m);
            if (do_reduce) m = sr::reduce_model(m);
            emit(out_path, sr::model_to_json(m).dump(2));
            return 0;
        }
    } catch (const sr::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 1;
    } catch (const sr::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const sr::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
