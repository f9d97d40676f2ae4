#ifndef SPEEDROUTE_TIMESAVE_HPP
#define SPEEDROUTE_TIMESAVE_HPP

#include "speedroute/solvers.hpp"

namespace speedroute {

/// Stage-ordering model: clearing a stage can save time on events of stages
/// cleared later; per event only the best previously-cleared alternative counts.
struct StageEvent {
    std::string id;
    std::map<std::string, long long> saves; // stage id -> integer save (seconds), >= 0
};

struct Stage {
    std::string id;
    Rational base_time;
    std::vector<StageEvent> events;
};

struct StageModel {
    std::vector<Stage> stages;

    const Stage& stage(const std::string& id) const;
    bool has_stage(const std::string& id) const;
};

StageModel load_stage_model(const json& doc);
StageModel load_stage_model_file(const std::string& path);
json stage_model_to_json(const StageModel& sm);

struct StageScore {
    Rational total_time;
    long long total_save = 0;
};

/// total_save sums, stage by stage, each event's best save among previously
/// cleared stages; total_time = sum of base times minus total_save.
StageScore score_ordering(const StageModel& sm, const std::vector<std::string>& order);

enum class StageSearchMode { Exact, Ga };

struct StageBest {
    std::vector<std::string> order;
    StageScore score;
};

/// Maximum-save ordering: exhaustive for n <= 10, permutation GA otherwise.
StageBest best_ordering(const StageModel& sm, StageSearchMode mode, const SolverParams& params);

/// Complete event digraph whose dynamic weight rules reproduce
/// score_ordering exactly: evaluating any stage-ordering walk yields the same
/// total time.
GameModel to_event_graph(const StageModel& sm);

/// The walk in to_event_graph(sm) that realizes ordering `order`.
std::vector<std::string> ordering_walk(const StageModel& sm, const std::vector<std::string>& order);

} // namespace speedroute

#endif
