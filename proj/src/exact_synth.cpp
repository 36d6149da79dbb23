#include "sjp/exact_synth.hpp"

#include "sjp/stability.hpp"

#include <chrono>

namespace sjp {

namespace {

struct Enumeration {
    const SystemModel& sys;
    const Configuration& c0;
    const GoalSet& goal;
    long long node_budget;
    std::optional<double> time_budget_seconds;
    std::chrono::steady_clock::time_point started;

    long long nodes = 0;
    JointOpenPlan candidate = {};
    std::vector<Configuration> run = {};

    void charge() {
        if (++nodes > node_budget)
            fail(Err::BudgetExceeded, "synthesis node budget exceeded");
        if (time_budget_seconds && (nodes & 0x3ff) == 0) {
            auto elapsed = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - started)
                               .count();
            if (elapsed > *time_budget_seconds)
                fail(Err::BudgetExceeded, "synthesis time budget exceeded");
        }
    }

    // Depth-first over available joint actions in declared order; candidates
    // are checked at exactly the target length, so the deepening loop stays
    // complete and deterministic.
    bool search(const Configuration& c, int depth, int target) {
        if (depth == target)
            return verify_stable(sys, c0, goal, candidate).stable;
        for (ActionId a1 : sys.avail(AgentId::Agent1, c.s1))
            for (ActionId a2 : sys.avail(AgentId::Agent2, c.s2)) {
                charge();
                candidate.seq1.push_back(a1);
                candidate.seq2.push_back(a2);
                if (search(step(sys, c, a1, a2), depth + 1, target)) return true;
                candidate.seq1.pop_back();
                candidate.seq2.pop_back();
            }
        return false;
    }
};

} // namespace

SynthResult sjpp_solve(const SystemModel& sys, const Configuration& c0,
                       const GoalSet& goal, const SynthBudget& budget) {
    int max_len = budget.max_len > 0 ? budget.max_len : sys.config_count();
    if (max_len < 1) fail(Err::OutOfRange, "max_len must be at least 1");

    Enumeration e{sys,
                  c0,
                  goal,
                  budget.node_budget,
                  budget.time_budget_seconds,
                  std::chrono::steady_clock::now()};
    SynthResult result;
    try {
        for (int len = 1; len <= max_len; ++len) {
            if (e.search(c0, 0, len)) {
                result.status = SynthStatus::Found;
                result.plan = e.candidate;
                result.nodes_explored = e.nodes;
                return result;
            }
        }
    } catch (const SjpError& err) {
        if (err.kind() != Err::BudgetExceeded) throw;
        result.status = SynthStatus::BudgetExceeded;
        result.nodes_explored = e.nodes;
        return result;
    }
    result.status = SynthStatus::NotFound;
    result.nodes_explored = e.nodes;
    return result;
}

} // namespace sjp
