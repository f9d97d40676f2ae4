#ifndef SPEEDROUTE_GEN_HPP
#define SPEEDROUTE_GEN_HPP

#include "speedroute/timesave.hpp"

namespace speedroute {

enum class GenFamily { CheckpointTsp, StageSave, ResourceGated };

struct GenSpec {
    GenFamily family = GenFamily::CheckpointTsp;
    int nodes = 6;
    int required = 3;   // resource-gated only; checkpoint-tsp requires every node
    int resources = 2;  // resource-gated only, clamped to 1..3
    int rules = 2;      // resource-gated discount rules
    std::uint64_t seed = 0;
};

GenFamily gen_family_from_string(const std::string& name);

struct Generated {
    json document;                       // the emitted model file
    std::optional<GameModel> model;      // event-graph families
    std::optional<StageModel> stage_model; // stage-save family
};

/// Deterministic under seed; every emitted instance validates and has at
/// least one feasible route (checked with repeat_cap 0 for event graphs).
Generated generate(const GenSpec& spec);

} // namespace speedroute

#endif
