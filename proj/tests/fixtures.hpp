#ifndef SPEEDROUTE_TEST_FIXTURES_HPP
#define SPEEDROUTE_TEST_FIXTURES_HPP

#include "speedroute/gen.hpp"

namespace fixtures {

// Chain alpha -> A -> B -> omega; exactly one feasible walk, total time 9.
inline const char* kLine = R"({
  "version": "speedroute-model/1",
  "start": "alpha",
  "ends": ["omega"],
  "required": ["A", "B"],
  "nodes": [{"id": "alpha"}, {"id": "A"}, {"id": "B"}, {"id": "omega"}],
  "edges": [
    {"id": "aA", "from": "alpha", "to": "A", "time": 3},
    {"id": "AB", "from": "A", "to": "B", "time": 2},
    {"id": "Bw", "from": "B", "to": "omega", "time": 4}
  ]
})";

// Two required events whose visit order matters: (A,B) costs 5, (B,A) costs 12.
inline const char* kSwap = R"({
  "version": "speedroute-model/1",
  "start": "alpha",
  "ends": ["omega"],
  "required": ["A", "B"],
  "nodes": [{"id": "alpha"}, {"id": "A"}, {"id": "B"}, {"id": "omega"}],
  "edges": [
    {"id": "aA", "from": "alpha", "to": "A", "time": 2},
    {"id": "aB", "from": "alpha", "to": "B", "time": 5},
    {"id": "AB", "from": "A", "to": "B", "time": 1},
    {"id": "BA", "from": "B", "to": "A", "time": 1},
    {"id": "Aw", "from": "A", "to": "omega", "time": 6},
    {"id": "Bw", "from": "B", "to": "omega", "time": 2}
  ]
})";

// kSwap plus an optional detour node C that halves every later move:
// best walk alpha,C,A,B,omega = 1 + 1 + 1/2 + 1 = 7/2; without C the best is 5.
inline const char* kGain = R"({
  "version": "speedroute-model/1",
  "start": "alpha",
  "ends": ["omega"],
  "required": ["A", "B"],
  "nodes": [{"id": "alpha"}, {"id": "A"}, {"id": "B"}, {"id": "C"}, {"id": "omega"}],
  "edges": [
    {"id": "aA", "from": "alpha", "to": "A", "time": 2, "tags": ["move"]},
    {"id": "aB", "from": "alpha", "to": "B", "time": 5, "tags": ["move"]},
    {"id": "AB", "from": "A", "to": "B", "time": 1, "tags": ["move"]},
    {"id": "BA", "from": "B", "to": "A", "time": 1, "tags": ["move"]},
    {"id": "Aw", "from": "A", "to": "omega", "time": 6, "tags": ["move"]},
    {"id": "Bw", "from": "B", "to": "omega", "time": 2, "tags": ["move"]},
    {"id": "aC", "from": "alpha", "to": "C", "time": 1, "tags": ["move"]},
    {"id": "CA", "from": "C", "to": "A", "time": 2, "tags": ["move"]}
  ],
  "rules": [
    {"id": "halve", "condition": {"done": "C"}, "tag": "move",
     "component": "time", "effect": {"multiply": 0.5}}
  ]
})";

// Chain with a bomb gate: B -> omega needs 1 bomb, only pickup C grants one.
inline const char* kResource = R"({
  "version": "speedroute-model/1",
  "start": "alpha",
  "ends": ["omega"],
  "required": ["A", "B"],
  "resources": [{"id": "bomb", "initial": 0, "cap": 2}],
  "nodes": [
    {"id": "alpha"}, {"id": "A"}, {"id": "B"}, {"id": "omega"},
    {"id": "C", "grants": {"bomb": 1}}
  ],
  "edges": [
    {"id": "aA", "from": "alpha", "to": "A", "time": 3},
    {"id": "AB", "from": "A", "to": "B", "time": 2},
    {"id": "AC", "from": "A", "to": "C", "time": 1},
    {"id": "CB", "from": "C", "to": "B", "time": 1},
    {"id": "Bw", "from": "B", "to": "omega", "time": 4, "requires": {"bomb": 1}}
  ]
})";

// Parallel A -> B edges trade speed against difficulty:
// front is exactly {(5, 9), (7, 2)}.
inline const char* kMo = R"({
  "version": "speedroute-model/1",
  "start": "alpha",
  "ends": ["omega"],
  "required": ["A", "B"],
  "nodes": [{"id": "alpha"}, {"id": "A"}, {"id": "B"}, {"id": "omega"}],
  "edges": [
    {"id": "aA", "from": "alpha", "to": "A", "time": 2, "difficulty": 1},
    {"id": "ABfast", "from": "A", "to": "B", "time": 1, "difficulty": 9},
    {"id": "ABslow", "from": "A", "to": "B", "time": 3, "difficulty": 2},
    {"id": "Bw", "from": "B", "to": "omega", "time": 2, "difficulty": 1}
  ]
})";

// Two interchangeable save-point rooms carrying the same cluster tag.
inline const char* kCluster = R"({
  "version": "speedroute-model/1",
  "start": "alpha",
  "ends": ["omega"],
  "required": [],
  "nodes": [
    {"id": "alpha"}, {"id": "omega"},
    {"id": "X1", "cluster_tag": "saveroom"},
    {"id": "X2", "cluster_tag": "saveroom"}
  ],
  "edges": [
    {"id": "aX1", "from": "alpha", "to": "X1", "time": 2},
    {"id": "aX2", "from": "alpha", "to": "X2", "time": 3},
    {"id": "X1w", "from": "X1", "to": "omega", "time": 4},
    {"id": "X2w", "from": "X2", "to": "omega", "time": 1}
  ]
})";

// In-game day/night cycle of period 10; Aw costs 5 extra before time 5.
inline const char* kClock = R"({
  "version": "speedroute-model/1",
  "start": "alpha",
  "ends": ["omega"],
  "required": ["A"],
  "clock": {"period": 10},
  "nodes": [{"id": "alpha"}, {"id": "A"}, {"id": "omega"}],
  "edges": [
    {"id": "aA", "from": "alpha", "to": "A", "time": 3},
    {"id": "Aw", "from": "A", "to": "omega", "time": 2}
  ],
  "rules": [
    {"id": "night", "condition": {"clock": {"from": 0, "to": 5}}, "edges": ["Aw"],
     "component": "time", "effect": {"add": 5}}
  ]
})";

// Three stages; best clear order is s1, s3, s2 with total save 7.
inline const char* kStages = R"({
  "version": "speedroute-stages/1",
  "stages": [
    {"id": "s1", "base_time": 10},
    {"id": "s2", "base_time": 12,
     "events": [{"id": "skip", "saves": {"s1": 3, "s3": 5}}]},
    {"id": "s3", "base_time": 8,
     "events": [{"id": "clip", "saves": {"s1": 2}}]}
  ]
})";

inline speedroute::GameModel line() { return speedroute::load_model_text(kLine); }
inline speedroute::GameModel swap() { return speedroute::load_model_text(kSwap); }
inline speedroute::GameModel gain() { return speedroute::load_model_text(kGain); }
inline speedroute::GameModel resource() { return speedroute::load_model_text(kResource); }
inline speedroute::GameModel mo() { return speedroute::load_model_text(kMo); }
inline speedroute::GameModel cluster() { return speedroute::load_model_text(kCluster); }
inline speedroute::GameModel clock_model() { return speedroute::load_model_text(kClock); }
inline speedroute::StageModel stages() {
    return speedroute::load_stage_model(speedroute::json::parse(kStages));
}

} // namespace fixtures

#endif
