#pragma once

// Conditional plans and verification under initial-configuration
// uncertainty: per-agent decision DAGs branching on the observed own state,
// synchronous execution with null padding, efficiency and stability over a
// set of possible initial configurations, an online detection monitor, and
// a shared-node text encoding.

#include "sjp/model.hpp"
#include "sjp/stability.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sjp {

inline constexpr int kHalt = -1;

struct CPlanNode {
    ActionId action = 0;
    std::map<StateId, int> branches;   // observed own state -> successor or kHalt
    std::optional<int> default_branch; // '*' branch, taken when no state matches
};

// Rooted DAG; node sharing keeps the encoding polynomial in realized paths.
struct ConditionalPlan {
    std::vector<CPlanNode> nodes;
    int root = kHalt; // kHalt = the empty plan
};

// Structural checks: successor references in range, graph acyclic.
// Branch totality over reachable states is a runtime concern (MissingBranch).
void validate_cplan(const ConditionalPlan& plan);

// Chain plan taking seq[i] at step i regardless of the observed state.
ConditionalPlan lift_open_plan(const std::vector<ActionId>& seq);

struct InitialSet {
    std::vector<Configuration> configs;
};

// Deduplicates and orders; rejects empty sets and invalid configurations.
InitialSet make_initial_set(const SystemModel& sys, std::vector<Configuration> configs);

// Synchronous execution of two conditional plans. Each agent reads its next
// action from its current node and branches on its own post-step state; an
// agent that halted before the other plays the reserved null action (which
// must be declared and available, else NullRequired). The run ends when both
// agents have halted.
Trajectory execute_conditional(const SystemModel& sys, const Configuration& c0,
                               const ConditionalPlan& plan1,
                               const ConditionalPlan& plan2,
                               const GoalSet* goal = nullptr);

struct ConditionalRun {
    Trajectory traj;
    int halt1 = 0, halt2 = 0; // step at which each agent's plan ended
};

// execute_conditional plus per-agent halt bookkeeping.
ConditionalRun run_conditional(const SystemModel& sys, const Configuration& c0,
                               const ConditionalPlan& plan1,
                               const ConditionalPlan& plan2,
                               const GoalSet* goal = nullptr);

struct IIEfficiencyVerdict {
    bool efficient = true;
    EfficiencyStatus status = EfficiencyStatus::Efficient;
    std::optional<Configuration> failing_c0; // first failing initial configuration
};

// Every possible initial configuration must reach the goal within
// |S1|*|S2|*|B| realized joint steps.
IIEfficiencyVerdict verify_ii_efficiency(const SystemModel& sys, const InitialSet& c0s,
                                         const GoalSet& goal,
                                         const ConditionalPlan& plan1,
                                         const ConditionalPlan& plan2);

// Stability under initial-configuration uncertainty, one deviator direction.
// Detection semantics: the detector flags a run at the first step its
// observation history is inconsistent with every honest run from the initial
// set. Because consistency filtering is monotone, an undetected deviation
// exists iff a single witness initial configuration matches the detector's
// observations at every step, so the search ranges over (actual, witness)
// pairs with matching detector initial states and filters a forward product
// per pair. Throws NotEfficient when the efficiency precondition fails.
StabilityVerdict verify_ii_stability(const SystemModel& sys, const InitialSet& c0s,
                                     const GoalSet& goal, const ConditionalPlan& plan1,
                                     const ConditionalPlan& plan2, AgentId deviator);

// Online form of the same consistency filter: consumes the detector's
// observed own-state stream and reports the first step at which no honest
// run from the initial set remains consistent.
class DetectionMonitor {
public:
    DetectionMonitor(const SystemModel& sys, const InitialSet& c0s,
                     const ConditionalPlan& plan1, const ConditionalPlan& plan2,
                     AgentId detector);

    // Feeds one observation; returns the step index when detection fires
    // (exactly once), nullopt otherwise.
    std::optional<int> feed(StateId observed);

    bool detected() const { return detected_; }
    int position() const { return position_; }
    int candidates_left() const;

private:
    const SystemModel& sys_;
    AgentId detector_;
    std::vector<std::vector<StateId>> honest_obs_; // per candidate initial
    std::vector<char> alive_;
    int position_ = 0;
    bool detected_ = false;
};

// Canonical text form with maximal node sharing: equal subgraphs are merged,
// so the byte size is linear in the number of distinct nodes.
std::string encode_cplan(const ConditionalPlan& plan, const SystemModel& sys,
                         AgentId agent);
ConditionalPlan decode_cplan(std::string_view text, const SystemModel& sys,
                             AgentId agent);

// Number of nodes the canonical encoding emits (shared halt leaf included).
int encoded_node_count(const ConditionalPlan& plan);

} // namespace sjp
