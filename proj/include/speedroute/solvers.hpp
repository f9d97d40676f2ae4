#ifndef SPEEDROUTE_SOLVERS_HPP
#define SPEEDROUTE_SOLVERS_HPP

#include <cstdint>
#include <random>

#include "speedroute/statespace.hpp"

namespace speedroute {

struct SolverParams {
    std::uint64_t seed = 0;
    int population = 128;
    int generations = 500;
    double crossover_rate = 0.9;
    double mutation_rate = 0.2;
    int elitism = 2;
    struct {
        int ants = 32;
        double evaporation = 0.5; // rho in (0, 1]
        double alpha = 1.0;
        double beta = 2.0;
        int iterations = 100;
    } aco;
    struct {
        int archive_cap = 64;
    } mo;
    int workers = 1;
};

/// Required-event visit order; the genome every metaheuristic works on.
using Permutation = std::vector<std::string>;

struct DecodeResult {
    bool feasible = false;
    Route route;
    std::string note; // failing pair on infeasibility
};

/// Greedy stitching: state-aware shortest path to each required node in
/// order, then to the nearest end.
DecodeResult decode(const GameModel& m, const Permutation& p, const SearchConfig& cfg);

/// Precedence relation over required nodes, derived from edge preconditions:
/// x must precede y when every edge into y demands done(x).
std::map<std::string, std::set<std::string>> required_precedence(const GameModel& m);

/// Required nodes still to be ordered (start is covered from the outset).
std::vector<std::string> permutation_base(const GameModel& m);

/// Reorders `p` so every derived precedence constraint holds, disturbing the
/// given order as little as possible. Returns false on a precedence cycle.
bool repair_permutation(const GameModel& m, const std::map<std::string, std::set<std::string>>& prec,
                        Permutation& p);

struct OracleResult {
    bool feasible = false;
    Route route;
    Permutation best_perm;
};

/// Enumerates every dependency-feasible permutation. Greedy mode stitches
/// like decode; full mode runs an exhaustive ordered search per permutation
/// and is exact within the caps.
OracleResult brute_force(const GameModel& m, const SearchConfig& cfg, bool full_mode = false);

struct ConvergenceRow {
    int generation = 0;
    double best = 0;
    double mean = 0;
    double feasible_fraction = 0;
};

struct SolveResult {
    bool feasible = false;
    Route route;
    Permutation best_perm;
    std::vector<ConvergenceRow> log;
    int init_retries = 0;
    std::string error;
};

SolveResult solve_ga(const GameModel& m, const SolverParams& params, const SearchConfig& cfg);
SolveResult solve_aco(const GameModel& m, const SolverParams& params, const SearchConfig& cfg);

struct ParetoFront {
    std::vector<Route> routes; // mutually non-dominated under (time, difficulty)
};

struct ParetoResult {
    bool feasible = false;
    ParetoFront front;
    std::string error;
};

ParetoResult solve_pareto(const GameModel& m, const SolverParams& params, const SearchConfig& cfg);

/// Independent Pareto oracle: all permutations crossed with every difficulty
/// cap present in the model.
ParetoFront brute_force_pareto(const GameModel& m, const SearchConfig& cfg);

/// a dominates b under minimization of (time, max_difficulty).
bool dominates(const Route& a, const Route& b);

std::string convergence_csv(const std::vector<ConvergenceRow>& log);

// Deterministic, implementation-independent RNG helpers.
inline std::size_t rand_index(std::mt19937_64& rng, std::size_t n) { return rng() % n; }
inline double rand_unit(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

// Permutation variation operators, shared with the stage-ordering GA.
Permutation ox1_crossover(const Permutation& a, const Permutation& b, std::mt19937_64& rng);
void mutate_permutation(Permutation& p, double rate, std::mt19937_64& rng);
void shuffle_permutation(Permutation& p, std::mt19937_64& rng);

} // namespace speedroute

#endif
