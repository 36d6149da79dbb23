#pragma once

// Stability verification for open joint plans: backward marking of
// time-stamped configurations, detection checking per deviator direction,
// and an independent brute-force oracle.

#include "sjp/model.hpp"

#include <optional>
#include <vector>

namespace sjp {

// Counterexample to stability: a run in which one agent deviates, the other
// follows its plan, the goal is never visited, and the detector's own state
// stays consistent with honest execution for the whole detection horizon.
struct DeviationCounterexample {
    AgentId deviator = AgentId::Agent2;
    int first_deviation_step = 0;           // first step whose configuration differs
    std::vector<ActionId> deviator_actions; // deviator's actions, steps 0..horizon-1
    Trajectory run;                         // configs and joint actions of the run

    // Filled by the k-stability verifier: the step by which detection was due.
    std::optional<int> detection_deadline;
    // Filled by the incomplete-information verifiers.
    std::optional<Configuration> actual_c0;
    std::optional<Configuration> witness_c0;
};

enum class UnstableKind { None, NotEfficient, UndetectedDeviation };

struct StabilityVerdict {
    bool stable = true;
    UnstableKind kind = UnstableKind::None;
    std::optional<AgentId> direction; // which agent deviated
    std::optional<DeviationCounterexample> counterexample;
};

// Backward marking over time-stamped configurations, one deviator direction.
// Good[k] holds exactly the configurations whose detector component equals
// the honest detector state at time k and from which the detector's
// remaining plan actions admit some deviator continuation staying marked up
// to the horizon. Returned as good[k][config_index], k = 0..t.
// Throws NotEfficient when the plan is not efficient from c0.
std::vector<std::vector<char>> mark_good(const SystemModel& sys, const GoalSet& goal,
                                         const JointOpenPlan& plan,
                                         const Configuration& c0, AgentId deviator);

// Decides whether every goal-preventing deviation by `deviator` is detected
// by the other agent within the plan horizon. Throws NotEfficient when the
// plan is not efficient from c0.
StabilityVerdict verify_detection(const SystemModel& sys, const Configuration& c0,
                                  const GoalSet& goal, const JointOpenPlan& plan,
                                  AgentId deviator);

// Full stability check: efficiency plus detection in both deviator
// directions. Failures are verdicts, never exceptions.
StabilityVerdict verify_stable(const SystemModel& sys, const Configuration& c0,
                               const GoalSet& goal, const JointOpenPlan& plan);

// Independent oracle: exhaustive depth-first enumeration of all available
// deviator action sequences. Shares no marking machinery with
// verify_detection. Intended for short plans and small action sets; throws
// BudgetExceeded when the node budget runs out.
StabilityVerdict brute_force_verify(const SystemModel& sys, const Configuration& c0,
                                    const GoalSet& goal, const JointOpenPlan& plan,
                                    AgentId deviator,
                                    long long node_budget = 10'000'000);

} // namespace sjp
