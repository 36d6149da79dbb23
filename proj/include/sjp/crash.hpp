#pragma once

// Crash-failure robustness: an agent stops at some time m and repeats the
// reserved null action from then on. The deviation space is polynomial, so
// verification enumerates it directly.

#include "sjp/conditional.hpp"
#include "sjp/model.hpp"
#include "sjp/stability.hpp"

namespace sjp {

struct CrashScenario {
    AgentId crasher = AgentId::Agent2;
    int crash_time = 0; // m >= 0; m at or beyond the crasher's halt is a no-op
};

// The crasher follows its plan for steps < m and plays null afterwards; the
// healthy agent follows its plan to its natural end, which also ends the
// run. Throws NullRequired when null is missing where the crasher needs it.
Trajectory crash_run(const SystemModel& sys, const Configuration& c0,
                     const ConditionalPlan& plan1, const ConditionalPlan& plan2,
                     const CrashScenario& scenario, const GoalSet* goal = nullptr);

struct CrashStats {
    long long scenarios = 0; // (initial, crasher, crash time) triples simulated
};

// For every initial configuration, crasher and crash time, the crash run
// must either visit the goal or give the healthy agent an observation
// sequence inconsistent with every honest run from a witness initial
// configuration sharing its initial state. Requires verify_ii_efficiency to
// pass (NotEfficient otherwise).
StabilityVerdict verify_crash_stability(const SystemModel& sys, const InitialSet& c0s,
                                        const GoalSet& goal,
                                        const ConditionalPlan& plan1,
                                        const ConditionalPlan& plan2,
                                        CrashStats* stats = nullptr);

} // namespace sjp
