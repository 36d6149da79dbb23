#include "sjp/crash.hpp"

#include "cursor_detail.hpp"

namespace sjp {

using detail::Cursor;
using detail::null_or_throw;
using detail::own_state;

Trajectory crash_run(const SystemModel& sys, const Configuration& c0,
                     const ConditionalPlan& plan1, const ConditionalPlan& plan2,
                     const CrashScenario& scenario, const GoalSet* goal) {
    validate_cplan(plan1);
    validate_cplan(plan2);
    if (scenario.crash_time < 0)
        fail(Err::OutOfRange, "crash time must be non-negative");
    if (!sys.valid_config(c0)) fail(Err::OutOfRange, "initial configuration invalid");

    Trajectory tr;
    tr.configs.push_back(c0);
    if (goal && is_goal(*goal, c0)) tr.goal_visited = 0;

    Cursor cur1{plan1, AgentId::Agent1, plan1.root};
    Cursor cur2{plan2, AgentId::Agent2, plan2.root};
    Cursor& healthy = scenario.crasher == AgentId::Agent1 ? cur2 : cur1;
    Cursor& broken = scenario.crasher == AgentId::Agent1 ? cur1 : cur2;

    // The run ends with the healthy agent's plan; the crasher is padded with
    // null from its crash time (or its own natural halt) onward.
    Configuration c = c0;
    int step_idx = 0;
    while (healthy.active()) {
        bool follows_plan = step_idx < scenario.crash_time && broken.active();
        ActionId broken_action =
            follows_plan ? broken.action()
                         : null_or_throw(sys, broken.agent, own_state(c, broken.agent));
        ActionId healthy_action = healthy.action();
        ActionId a1 =
            scenario.crasher == AgentId::Agent1 ? broken_action : healthy_action;
        ActionId a2 =
            scenario.crasher == AgentId::Agent1 ? healthy_action : broken_action;
        c = step(sys, c, a1, a2);
        ++step_idx;
        tr.configs.push_back(c);
        tr.actions.push_back(JointAction{a1, a2});
        if (goal && !tr.goal_visited && is_goal(*goal, c)) tr.goal_visited = step_idx;
        healthy.advance(sys, own_state(c, healthy.agent), step_idx);
        if (follows_plan) broken.advance(sys, own_state(c, broken.agent), step_idx);
    }
    return tr;
}

namespace {

std::vector<StateId> healthy_obs(const Trajectory& tr, AgentId healthy, int upto) {
    std::vector<StateId> obs;
    for (int u = 0; u <= upto && u < static_cast<int>(tr.configs.size()); ++u)
        obs.push_back(own_state(tr.configs[u], healthy));
    return obs;
}

} // namespace

StabilityVerdict verify_crash_stability(const SystemModel& sys, const InitialSet& c0s,
                                        const GoalSet& goal,
                                        const ConditionalPlan& plan1,
                                        const ConditionalPlan& plan2,
                                        CrashStats* stats) {
    IIEfficiencyVerdict eff = verify_ii_efficiency(sys, c0s, goal, plan1, plan2);
    if (!eff.efficient)
        fail(Err::NotEfficient, std::string("conditional plan is not efficient: ") +
                                    efficiency_status_name(eff.status));

    StabilityVerdict verdict;

    // Honest runs once per initial configuration; the healthy agent's
    // observation sequences (truncated at its own halt) are the witness
    // streams undetected crash runs must match.
    struct HonestInfo {
        ConditionalRun run;
    };
    std::vector<HonestInfo> honest;
    honest.reserve(c0s.configs.size());
    for (const Configuration& c0 : c0s.configs)
        honest.push_back(HonestInfo{run_conditional(sys, c0, plan1, plan2, &goal)});

    for (size_t ai = 0; ai < c0s.configs.size(); ++ai) {
        const Configuration& c0a = c0s.configs[ai];
        for (AgentId crasher : {AgentId::Agent1, AgentId::Agent2}) {
            const AgentId healthy = other(crasher);
            int crasher_halt = crasher == AgentId::Agent1 ? honest[ai].run.halt1
                                                          : honest[ai].run.halt2;
            // A crash at or beyond the crasher's natural end is a no-op.
            for (int m = 0; m < crasher_halt; ++m) {
                if (stats) ++stats->scenarios;
                CrashScenario scenario{crasher, m};
                Trajectory run;
                try {
                    run = crash_run(sys, c0a, plan1, plan2, scenario, &goal);
                } catch (const SjpError& e) {
                    // The healthy agent can only run off its plan's domain
                    // after its observations diverged from every honest run,
                    // i.e. after the crash was detected.
                    if (e.kind() == Err::UnavailableAction ||
                        e.kind() == Err::MissingBranch)
                        continue;
                    throw;
                }
                if (run.goal_visited) continue;
                std::vector<StateId> obs =
                    healthy_obs(run, healthy, static_cast<int>(run.steps()));
                for (size_t wi = 0; wi < c0s.configs.size(); ++wi) {
                    int wh = healthy == AgentId::Agent1 ? honest[wi].run.halt1
                                                        : honest[wi].run.halt2;
                    std::vector<StateId> wobs =
                        healthy_obs(honest[wi].run.traj, healthy, wh);
                    if (obs != wobs) continue;

                    DeviationCounterexample cex;
                    cex.deviator = crasher;
                    cex.first_deviation_step = m;
                    cex.actual_c0 = c0a;
                    cex.witness_c0 = c0s.configs[wi];
                    cex.run = run;
                    for (const auto& ja : run.actions)
                        cex.deviator_actions.push_back(
                            crasher == AgentId::Agent1 ? ja.a1 : ja.a2);
                    verdict.stable = false;
                    verdict.kind = UnstableKind::UndetectedDeviation;
                    verdict.direction = crasher;
                    verdict.counterexample = std::move(cex);
                    return verdict;
                }
            }
        }
    }
    return verdict;
}

} // namespace sjp
