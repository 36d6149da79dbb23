#pragma once

// Private helpers shared by the conditional-plan runner and the crash
// simulator: a cursor over one agent's decision DAG plus null padding.

#include "sjp/conditional.hpp"
#include "sjp/model.hpp"

#include <string>

namespace sjp::detail {

inline StateId own_state(const Configuration& c, AgentId agent) {
    return agent == AgentId::Agent1 ? c.s1 : c.s2;
}

struct Cursor {
    const ConditionalPlan& plan;
    AgentId agent;
    int node;           // kHalt once the agent stopped
    int halt_step = -1; // step index at which the agent halted

    bool active() const { return node != kHalt; }

    ActionId action() const { return plan.nodes[node].action; }

    void advance(const SystemModel& sys, StateId observed, int next_step) {
        const CPlanNode& n = plan.nodes[node];
        auto it = n.branches.find(observed);
        int succ;
        if (it != n.branches.end())
            succ = it->second;
        else if (n.default_branch)
            succ = *n.default_branch;
        else
            fail(Err::MissingBranch,
                 "plan node " + std::to_string(node) + " of agent " +
                     std::to_string(agent_number(agent)) +
                     " has no branch for state '" + sys.state_name(agent, observed) +
                     "'");
        node = succ;
        if (node == kHalt) halt_step = next_step;
    }
};

inline ActionId null_or_throw(const SystemModel& sys, AgentId agent, StateId s) {
    auto null_id = sys.null_action(agent);
    if (!null_id || !sys.is_available(agent, s, *null_id))
        fail(Err::NullRequired,
             "agent " + std::to_string(agent_number(agent)) +
                 " must play null in state '" + sys.state_name(agent, s) +
                 "' but it is not declared available there");
    return *null_id;
}

} // namespace sjp::detail
