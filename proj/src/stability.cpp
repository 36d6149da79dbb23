#include "sjp/stability.hpp"

#include <algorithm>

namespace sjp {

namespace {

StateId detector_state(const Configuration& c, AgentId deviator) {
    return deviator == AgentId::Agent2 ? c.s1 : c.s2;
}

StateId deviator_state(const Configuration& c, AgentId deviator) {
    return deviator == AgentId::Agent2 ? c.s2 : c.s1;
}

// Joint action with the detector playing its plan action and the deviator
// playing an arbitrary choice.
Configuration step_mixed(const SystemModel& sys, const Configuration& c,
                         ActionId detector_action, ActionId deviator_action,
                         AgentId deviator) {
    if (deviator == AgentId::Agent2)
        return step(sys, c, detector_action, deviator_action);
    return step(sys, c, deviator_action, detector_action);
}

const std::vector<ActionId>& plan_of(const JointOpenPlan& plan, AgentId agent) {
    return agent == AgentId::Agent1 ? plan.seq1 : plan.seq2;
}

struct HonestRun {
    Trajectory run;
    std::vector<StateId> detector_states; // nominal detector state per time 0..t
};

HonestRun honest_run_or_throw(const SystemModel& sys, const Configuration& c0,
                              const GoalSet& goal, const JointOpenPlan& plan,
                              AgentId deviator) {
    EfficiencyVerdict eff = check_efficient(sys, c0, goal, plan);
    if (!eff.efficient())
        fail(Err::NotEfficient, std::string("plan is not efficient: ") +
                                    efficiency_status_name(eff.status));
    HonestRun h;
    h.run = std::move(eff.run);
    h.detector_states.reserve(h.run.configs.size());
    for (const auto& c : h.run.configs)
        h.detector_states.push_back(detector_state(c, deviator));
    return h;
}

} // namespace

std::vector<std::vector<char>> mark_good(const SystemModel& sys, const GoalSet& goal,
                                         const JointOpenPlan& plan,
                                         const Configuration& c0, AgentId deviator) {
    HonestRun honest = honest_run_or_throw(sys, c0, goal, plan, deviator);
    const int t = plan.length();
    const int nc = sys.config_count();
    const AgentId detector = other(deviator);
    const auto& detector_plan = plan_of(plan, detector);

    // Marking is stratified by time, so a single backward pass reaches the
    // fixpoint of the marking rules.
    std::vector<std::vector<char>> good(t + 1, std::vector<char>(nc, 0));
    for (int ci = 0; ci < nc; ++ci)
        good[t][ci] = detector_state(sys.config_at(ci), deviator) ==
                              honest.detector_states[t]
                          ? 1
                          : 0;
    for (int k = t - 1; k >= 0; --k) {
        for (int ci = 0; ci < nc; ++ci) {
            Configuration c = sys.config_at(ci);
            if (detector_state(c, deviator) != honest.detector_states[k]) continue;
            for (ActionId e : sys.avail(deviator, deviator_state(c, deviator))) {
                Configuration next =
                    step_mixed(sys, c, detector_plan[k], e, deviator);
                if (good[k + 1][sys.config_index(next)]) {
                    good[k][ci] = 1;
                    break;
                }
            }
        }
    }
    return good;
}

StabilityVerdict verify_detection(const SystemModel& sys, const Configuration& c0,
                                  const GoalSet& goal, const JointOpenPlan& plan,
                                  AgentId deviator) {
    auto good = mark_good(sys, goal, plan, c0, deviator);
    const int t = plan.length();
    const int nc = sys.config_count();
    const AgentId detector = other(deviator);
    const auto& detector_plan = plan_of(plan, detector);
    const auto gmask = goal_mask(sys, goal);

    // Bad[k]: marked configurations from which a goal-avoiding marked run can
    // be completed to the horizon. Unstable iff c0 is bad at time 0.
    std::vector<std::vector<char>> bad(t + 1, std::vector<char>(nc, 0));
    for (int ci = 0; ci < nc; ++ci) bad[t][ci] = good[t][ci] && !gmask[ci];
    for (int k = t - 1; k >= 0; --k) {
        for (int ci = 0; ci < nc; ++ci) {
            if (!good[k][ci] || gmask[ci]) continue;
            Configuration c = sys.config_at(ci);
            for (ActionId e : sys.avail(deviator, deviator_state(c, deviator))) {
                Configuration next =
                    step_mixed(sys, c, detector_plan[k], e, deviator);
                if (bad[k + 1][sys.config_index(next)]) {
                    bad[k][ci] = 1;
                    break;
                }
            }
        }
    }

    StabilityVerdict v;
    if (!bad[0][sys.config_index(c0)]) return v;

    // Extract a witness run by following bad-set membership forward. Note no
    // explicit "differs from the plan" test is needed: a goal-avoiding run
    // using only prescribed actions would contradict the efficiency
    // precondition, so the extracted run always contains a real deviation.
    DeviationCounterexample cex;
    cex.deviator = deviator;
    cex.run.configs.push_back(c0);
    Configuration c = c0;
    int first_dev = -1;
    HonestRun honest = honest_run_or_throw(sys, c0, goal, plan, deviator);
    for (int k = 0; k < t; ++k) {
        for (ActionId e : sys.avail(deviator, deviator_state(c, deviator))) {
            Configuration next = step_mixed(sys, c, detector_plan[k], e, deviator);
            if (!bad[k + 1][sys.config_index(next)]) continue;
            cex.deviator_actions.push_back(e);
            JointAction ja = deviator == AgentId::Agent2
                                 ? JointAction{detector_plan[k], e}
                                 : JointAction{e, detector_plan[k]};
            cex.run.actions.push_back(ja);
            cex.run.configs.push_back(next);
            if (first_dev < 0 && !(next == honest.run.configs[k + 1]))
                first_dev = k;
            c = next;
            break;
        }
    }
    cex.first_deviation_step = first_dev < 0 ? 0 : first_dev;
    v.stable = false;
    v.kind = UnstableKind::UndetectedDeviation;
    v.direction = deviator;
    v.counterexample = std::move(cex);
    return v;
}

StabilityVerdict verify_stable(const SystemModel& sys, const Configuration& c0,
                               const GoalSet& goal, const JointOpenPlan& plan) {
    EfficiencyVerdict eff;
    try {
        eff = check_efficient(sys, c0, goal, plan);
    } catch (const SjpError& e) {
        // Plan-level failures fold into the verdict; model defects
        // (UndefinedTransition and friends) stay loud.
        if (e.kind() != Err::UnavailableAction && e.kind() != Err::EmptyPlan &&
            e.kind() != Err::LengthMismatch)
            throw;
        StabilityVerdict v;
        v.stable = false;
        v.kind = UnstableKind::NotEfficient;
        return v;
    }
    if (!eff.efficient()) {
        StabilityVerdict v;
        v.stable = false;
        v.kind = UnstableKind::NotEfficient;
        return v;
    }
    for (AgentId dev : {AgentId::Agent1, AgentId::Agent2}) {
        StabilityVerdict v = verify_detection(sys, c0, goal, plan, dev);
        if (!v.stable) return v;
    }
    return StabilityVerdict{};
}

namespace {

struct BruteSearch {
    const SystemModel& sys;
    const JointOpenPlan& plan;
    AgentId deviator;
    const std::vector<ActionId>& detector_plan;
    const std::vector<StateId>& nominal_detector;
    const GoalSet& goal;
    long long budget;
    long long nodes = 0;

    std::vector<ActionId> chosen = {};
    std::vector<Configuration> path = {};

    bool dfs(const Configuration& c, int k) {
        if (++nodes > budget)
            fail(Err::BudgetExceeded, "brute-force enumeration budget exceeded");
        // A run that visits the goal does not prevent goal achievement, and a
        // detector mismatch means the deviation was detected.
        if (is_goal(goal, c)) return false;
        if (detector_state(c, deviator) != nominal_detector[k]) return false;
        if (k == plan.length()) return true;
        for (ActionId e : sys.avail(deviator, deviator_state(c, deviator))) {
            Configuration next = step_mixed(sys, c, detector_plan[k], e, deviator);
            chosen.push_back(e);
            path.push_back(next);
            if (dfs(next, k + 1)) return true;
            chosen.pop_back();
            path.pop_back();
        }
        return false;
    }
};

} // namespace

StabilityVerdict brute_force_verify(const SystemModel& sys, const Configuration& c0,
                                    const GoalSet& goal, const JointOpenPlan& plan,
                                    AgentId deviator, long long node_budget) {
    const AgentId detector = other(deviator);
    const auto& detector_plan = plan_of(plan, detector);

    // Nominal detector states come from plain forward simulation.
    Trajectory honest = execute_open(sys, c0, plan, &goal);
    std::vector<StateId> nominal;
    nominal.reserve(honest.configs.size());
    for (const auto& c : honest.configs)
        nominal.push_back(detector_state(c, deviator));

    BruteSearch search{sys, plan, deviator, detector_plan, nominal, goal,
                       node_budget};
    StabilityVerdict v;
    if (!search.dfs(c0, 0)) return v;

    DeviationCounterexample cex;
    cex.deviator = deviator;
    cex.deviator_actions = search.chosen;
    cex.run.configs.push_back(c0);
    for (size_t i = 0; i < search.path.size(); ++i) {
        ActionId e = search.chosen[i];
        JointAction ja = deviator == AgentId::Agent2
                             ? JointAction{detector_plan[i], e}
                             : JointAction{e, detector_plan[i]};
        cex.run.actions.push_back(ja);
        cex.run.configs.push_back(search.path[i]);
    }
    int first_dev = 0;
    for (size_t i = 0; i < search.path.size(); ++i)
        if (!(search.path[i] == honest.configs[i + 1])) {
            first_dev = static_cast<int>(i);
            break;
        }
    cex.first_deviation_step = first_dev;
    v.stable = false;
    v.kind = UnstableKind::UndetectedDeviation;
    v.direction = deviator;
    v.counterexample = std::move(cex);
    return v;
}

} // namespace sjp
