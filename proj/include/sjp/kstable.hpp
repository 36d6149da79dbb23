#pragma once

// k-stability: verification that a deviation at time m is detected no later
// than time min(m+k+1, t), and plan synthesis over a layered graph of
// (time, configuration, action-window) nodes.

#include "sjp/model.hpp"
#include "sjp/stability.hpp"

#include <optional>
#include <vector>

namespace sjp {

// A window is k+1 consecutive joint actions, feasible along its own honest
// run from the configuration it is attached to.
using Window = std::vector<JointAction>;

// True iff every first-step deviation from the window is detected while the
// other agent performs the window's remaining k actions. A deviator sequence
// counts as an undetectable deviation iff its first step changes the
// configuration relative to the honest window run and the detector's own
// states match the honest window states over all k+1 steps.
bool window_deviation_check(const SystemModel& sys, const Configuration& config,
                            const Window& window, AgentId deviator);

struct KstableBudget {
    long long max_windows = 2'000'000; // total materialized windows across configs
};

// Per-configuration window tables plus the layered reachability skeleton.
// A node is (time, config, window index); an edge (t,c,w) -> (t+1,c',w')
// exists iff c' is the window's first-action successor, the k-action overlap
// holds, and the source window passes the deviation check for both agents.
class WindowGraph {
public:
    int k = 0;
    int max_time = 0;          // node layers 0..max_time
    int max_base_time = 0;     // latest layer where a base node yields an efficient plan
    std::vector<std::vector<Window>> windows;     // [config] -> feasible windows
    std::vector<std::vector<int>> first_target;   // [config][w] -> config index
    std::vector<std::vector<char>> safe;          // [config][w] -> deviation check ok
    std::vector<std::vector<char>> base_good;     // first action reaches goal && safe
    std::vector<std::vector<std::vector<int>>> succ; // [config][w] -> overlap-compatible
                                                     // window indices at first_target
    std::vector<std::vector<char>> reachable; // [time][config], exact-step reachability

    bool has_edge(int cfg_a, int wa, int cfg_b, int wb) const;
};

WindowGraph build_window_graph(const SystemModel& sys, const Configuration& c0,
                               const GoalSet& goal, int k,
                               const KstableBudget& budget = {});

enum class SynthStatus { Found, NotFound, BudgetExceeded };

struct SynthResult {
    SynthStatus status = SynthStatus::NotFound;
    std::optional<JointOpenPlan> plan;
    long long nodes_explored = 0;

    bool found() const { return status == SynthStatus::Found; }
};

// Backward goodness propagation over the window graph; on success extracts
// the shortest good chain's first actions plus the terminal window's k-step
// detection tail, which keeps deviations from the goal-reaching action
// detectable. The returned plan is efficient and k-stable.
SynthResult sjpa(const SystemModel& sys, const Configuration& c0, const GoalSet& goal,
                 int k, const KstableBudget& budget = {});

// Checks detection of every deviation within its window: for each deviator,
// each start time m before the honest run first visits the goal, and each
// deviator action sequence over steps m..min(m+k+1,t)-1 whose step-(m+1)
// configuration differs from nominal, the detector's state must leave the
// nominal sequence at some step in (m, min(m+k+1,t)]. Deviations starting at
// or after the honest goal visit cannot prevent it and are exempt.
StabilityVerdict verify_kstable(const SystemModel& sys, const Configuration& c0,
                                const GoalSet& goal, const JointOpenPlan& plan, int k);

} // namespace sjp
