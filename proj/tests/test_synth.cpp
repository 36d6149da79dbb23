#include "sjp/exact_synth.hpp"

#include "sjp/generators.hpp"
#include "sjp/stability.hpp"

#include "fixtures.hpp"

#include <doctest.h>

using namespace sjp;
using namespace sjp::test;

TEST_CASE("sjpp finds the forced one-step plan when no deviations exist") {
    Fixture c = sys_c();
    SynthResult r = sjpp_solve(c.sys, c.c0, c.goal, {});
    REQUIRE(r.status == SynthStatus::Found);
    CHECK(r.plan->length() == 1);
    CHECK(verify_stable(c.sys, c.c0, c.goal, *r.plan).stable);
}

TEST_CASE("sjpp on the wrong-turn fixtures") {
    Fixture b = sys_b();
    SynthResult rb = sjpp_solve(b.sys, b.c0, b.goal, {});
    REQUIRE(rb.status == SynthStatus::Found);
    CHECK(verify_stable(b.sys, b.c0, b.goal, *rb.plan).stable);
    CHECK(check_efficient(b.sys, b.c0, b.goal, *rb.plan).efficient());

    // The undetectable wrong turn admits no stable plan of any length.
    Fixture a = sys_a();
    CHECK(sjpp_solve(a.sys, a.c0, a.goal, {}).status == SynthStatus::NotFound);
}

TEST_CASE("sjpp is deterministic") {
    Fixture b = sys_b();
    SynthResult r1 = sjpp_solve(b.sys, b.c0, b.goal, {});
    SynthResult r2 = sjpp_solve(b.sys, b.c0, b.goal, {});
    REQUIRE(r1.status == SynthStatus::Found);
    CHECK(r1.plan->seq1 == r2.plan->seq1);
    CHECK(r1.plan->seq2 == r2.plan->seq2);
    CHECK(r1.nodes_explored == r2.nodes_explored);
}

TEST_CASE("sjpp reduction instances follow satisfiability") {
    Cnf sat;
    sat.num_vars = 1;
    sat.clauses = {{1, 1, 1}};
    Instance si = reduce_3sat(sat);
    SynthResult rs = sjpp_solve(si.system, si.c0, si.goal, {});
    REQUIRE(rs.status == SynthStatus::Found);
    CHECK(verify_stable(si.system, si.c0, si.goal, *rs.plan).stable);
    CHECK(sat_brute(sat).satisfiable());

    Cnf unsat;
    unsat.num_vars = 1;
    unsat.clauses = {{1, 1, 1}, {-1, -1, -1}};
    Instance ui = reduce_3sat(unsat);
    CHECK(sjpp_solve(ui.system, ui.c0, ui.goal, {}).status == SynthStatus::NotFound);
    CHECK_FALSE(sat_brute(unsat).satisfiable());
}

TEST_CASE("sjpp budget exhaustion reports unknown") {
    Fixture a = sys_a();
    SynthBudget tiny;
    tiny.node_budget = 3;
    CHECK(sjpp_solve(a.sys, a.c0, a.goal, tiny).status == SynthStatus::BudgetExceeded);
}

TEST_CASE("grid worlds: independent dynamics admit no detectable deviations") {
    // Both agents already at their goals: any one-step plan is vacuously
    // stable because the goal holds at step 0.
    Instance at_goal = gen_grid(1, 2, {0, 0}, {0, 1}, {0, 0}, {0, 1});
    SynthResult r1 = sjpp_solve(at_goal.system, at_goal.c0, at_goal.goal, {});
    REQUIRE(r1.status == SynthStatus::Found);
    CHECK(r1.plan->length() == 1);

    // Goals swapped on a 1x2 strip: each agent's movement is invisible to
    // the other, so no stable plan exists; the search exhausts all lengths.
    Instance swapped = gen_grid(1, 2, {0, 0}, {0, 1}, {0, 1}, {0, 0});
    SynthResult r2 = sjpp_solve(swapped.system, swapped.c0, swapped.goal, {});
    CHECK(r2.status == SynthStatus::NotFound);
}
