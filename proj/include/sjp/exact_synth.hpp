#pragma once

// Exact stable-plan synthesis by iterative-deepening enumeration with full
// verification. Exponential by design; meant for desk-scale instances and
// reduction cross-checks.

#include "sjp/kstable.hpp"
#include "sjp/model.hpp"

#include <optional>

namespace sjp {

struct SynthBudget {
    int max_len = 0;                    // 0 = default |C|
    long long node_budget = 10'000'000; // enumeration tree nodes
    std::optional<double> time_budget_seconds;
};

// Iterative deepening over plan length 1..max_len, depth-first over available
// joint actions in declared order; a candidate is accepted iff verify_stable
// passes. NotFound is complete up to max_len; BudgetExceeded means unknown.
SynthResult sjpp_solve(const SystemModel& sys, const Configuration& c0,
                       const GoalSet& goal, const SynthBudget& budget = {});

} // namespace sjp
