#include "sjp/model.hpp"

#include "fixtures.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace sjp;
using namespace sjp::test;

TEST_CASE("step follows the fixture transition table") {
    Fixture f = sys_a();
    ActionId go = *f.sys.find_action(AgentId::Agent1, "go");
    ActionId bad = *f.sys.find_action(AgentId::Agent2, "bad");
    Configuration next = step(f.sys, f.c0, go, bad);
    CHECK(f.sys.config_name(next) == "(u1,v0,e)");
}

TEST_CASE("step on a one-configuration self-loop system") {
    SystemModel m;
    StateId s = m.add_state1("s");
    StateId v = m.add_state2("v");
    StateId e = m.add_env_state("e");
    ActionId n1 = m.add_action1("noop");
    ActionId n2 = m.add_action2("noop");
    m.add_avail(AgentId::Agent1, s, n1);
    m.add_avail(AgentId::Agent2, v, n2);
    m.add_row(s, v, e, n1, n2, {s, v, e});
    m.finalize();
    CHECK(validate_system(m).empty());
    Configuration c{s, v, e};
    CHECK(step(m, c, n1, n2) == c);
}

TEST_CASE("step rejects unavailable actions and reports missing rows") {
    Fixture f = sys_a();
    ActionId go = *f.sys.find_action(AgentId::Agent1, "go");
    ActionId bad = *f.sys.find_action(AgentId::Agent2, "bad");
    StateId v1 = *f.sys.find_state(AgentId::Agent2, "v1");
    Configuration at_v1{f.c0.s1, v1, f.c0.b};
    CHECK_THROWS_WITH_AS(step(f.sys, at_v1, go, bad),
                         doctest::Contains("not available"), SjpError);

    // Deleting a row surfaces as UndefinedTransition, not silence.
    SystemModel broken = f.sys;
    broken.rows.erase(broken.rows.begin());
    broken.finalize();
    bool hit = false;
    for (int ci = 0; ci < broken.config_count() && !hit; ++ci) {
        Configuration c = broken.config_at(ci);
        for (ActionId a1 : broken.avail(AgentId::Agent1, c.s1))
            for (ActionId a2 : broken.avail(AgentId::Agent2, c.s2))
                if (broken.lookup(c, a1, a2) < 0) {
                    CHECK_THROWS_AS(step(broken, c, a1, a2), SjpError);
                    hit = true;
                }
    }
    CHECK(hit);
}

TEST_CASE("execute_open runs the fixture plan and tracks the goal") {
    Fixture f = sys_a();
    Trajectory tr = execute_open(f.sys, f.c0, f.plan, &f.goal);
    REQUIRE(tr.configs.size() == 2);
    CHECK(f.sys.config_name(tr.configs[0]) == "(u0,v0,e)");
    CHECK(f.sys.config_name(tr.configs[1]) == "(u1,v1,e)");
    CHECK(tr.goal_visited == 1);
}

TEST_CASE("execute_open rejects the empty plan") {
    Fixture f = sys_a();
    JointOpenPlan empty;
    CHECK_THROWS_AS(execute_open(f.sys, f.c0, empty), SjpError);
    try {
        execute_open(f.sys, f.c0, empty);
    } catch (const SjpError& e) {
        CHECK(e.kind() == Err::EmptyPlan);
    }
}

TEST_CASE("is_goal: wildcards, mismatches, empty set") {
    SystemModel m;
    m.add_state1("l1");
    m.add_state2("l2");
    m.add_env_state("e7");
    GoalSet wild;
    wild.patterns.push_back({0, 0, std::nullopt});
    CHECK(is_goal(wild, {0, 0, 0}));

    GoalSet exact;
    exact.patterns.push_back({0, 0, 0});
    CHECK_FALSE(is_goal(exact, {0, 1, 0}));

    GoalSet empty;
    CHECK_FALSE(is_goal(empty, {0, 0, 0}));
}

TEST_CASE("check_efficient on the fixture") {
    Fixture f = sys_a();
    CHECK(check_efficient(f.sys, f.c0, f.goal, f.plan).efficient());

    JointOpenPlan bad_plan = f.plan;
    bad_plan.seq2 = {*f.sys.find_action(AgentId::Agent2, "bad")};
    EfficiencyVerdict v = check_efficient(f.sys, f.c0, f.goal, bad_plan);
    CHECK_FALSE(v.efficient());
    CHECK(v.status == EfficiencyStatus::GoalMissed);
}

TEST_CASE("check_efficient rejects over-long plans regardless of trajectory") {
    Fixture f = sys_a();
    ActionId go = *f.sys.find_action(AgentId::Agent1, "go");
    ActionId good = *f.sys.find_action(AgentId::Agent2, "good");
    JointOpenPlan long_plan;
    for (int i = 0; i <= f.sys.config_count(); ++i) {
        long_plan.seq1.push_back(go);
        long_plan.seq2.push_back(good);
    }
    EfficiencyVerdict v = check_efficient(f.sys, f.c0, f.goal, long_plan);
    CHECK(v.status == EfficiencyStatus::TooLong);
}

TEST_CASE("validate_system accepts the fixtures") {
    CHECK(validate_system(sys_a().sys).empty());
    CHECK(validate_system(sys_b().sys).empty());
    CHECK(validate_system(sys_c().sys).empty());
    CHECK(validate_system(sys_d().sys).empty());
}

TEST_CASE("validate_system flags a deleted row as missing") {
    Fixture f = sys_a();
    f.sys.rows.erase(f.sys.rows.begin());
    f.sys.finalize();
    auto defects = validate_system(f.sys);
    REQUIRE(defects.size() == 1);
    CHECK(defects[0].kind == DefectKind::MissingTransition);
}

TEST_CASE("validate_system flags conflicting duplicate rows") {
    Fixture f = sys_a();
    TransitionRow dup = f.sys.rows.front();
    dup.image = f.c0; // different image for the same key
    f.sys.rows.push_back(dup);
    f.sys.finalize();
    auto defects = validate_system(f.sys);
    REQUIRE(defects.size() == 1);
    CHECK(defects[0].kind == DefectKind::NondeterministicTransition);
}

TEST_CASE("validate_system flags empty availability") {
    SystemModel m;
    m.add_state1("s");
    m.add_state2("v");
    m.add_env_state("e");
    m.add_action1("a");
    m.add_action2("b");
    m.add_avail(AgentId::Agent1, 0, 0); // agent 2's state stays empty
    m.finalize();
    auto defects = validate_system(m);
    REQUIRE_FALSE(defects.empty());
    CHECK(defects[0].kind == DefectKind::EmptyAvailability);
}

TEST_CASE("determinism: repeated step calls agree") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RandomCase rc = random_efficient_case(seed, RandomSpec{}, 5);
        const auto& sys = rc.inst.system;
        std::mt19937_64 rng(seed);
        for (int trial = 0; trial < 20; ++trial) {
            Configuration c = sys.config_at(
                static_cast<int>(pick(rng, sys.config_count())));
            const auto& av1 = sys.avail(AgentId::Agent1, c.s1);
            const auto& av2 = sys.avail(AgentId::Agent2, c.s2);
            ActionId a1 = av1[pick(rng, av1.size())];
            ActionId a2 = av2[pick(rng, av2.size())];
            CHECK(step(sys, c, a1, a2) == step(sys, c, a1, a2));
        }
    }
}

TEST_CASE("trajectory coherence: replaying the joint actions reproduces configs") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        RandomCase rc = random_efficient_case(seed, RandomSpec{}, 6);
        Trajectory tr =
            execute_open(rc.inst.system, rc.inst.c0, rc.plan, &rc.inst.goal);
        Configuration c = tr.configs.front();
        for (int u = 0; u < tr.steps(); ++u) {
            c = step(rc.inst.system, c, tr.actions[u].a1, tr.actions[u].a2);
            CHECK(c == tr.configs[u + 1]);
        }
    }
}

TEST_CASE("efficiency bound: never efficient beyond |C| steps") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RandomSpec small;
        small.states1 = 2;
        small.states2 = 1;
        small.env_states = 1;
        Instance inst = gen_random(seed, small);
        std::mt19937_64 rng(seed);
        JointOpenPlan plan = random_plan(inst.system, inst.c0,
                                         inst.system.config_count() + 1, rng);
        GoalSet anything;
        anything.patterns.push_back({std::nullopt, std::nullopt, std::nullopt});
        EfficiencyVerdict v = check_efficient(inst.system, inst.c0, anything, plan);
        CHECK(v.status == EfficiencyStatus::TooLong);
    }
}

TEST_CASE("goal monotonicity: adding a pattern never unmatches") {
    std::mt19937_64 rng(7);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Instance inst = gen_random(seed, RandomSpec{});
        const auto& sys = inst.system;
        for (int trial = 0; trial < 30; ++trial) {
            Configuration c =
                sys.config_at(static_cast<int>(pick(rng, sys.config_count())));
            bool before = is_goal(inst.goal, c);
            GoalSet extended = inst.goal;
            GoalPattern extra;
            if (pick(rng, 2)) extra.s1 = static_cast<StateId>(pick(rng, sys.n1()));
            if (pick(rng, 2)) extra.s2 = static_cast<StateId>(pick(rng, sys.n2()));
            extended.patterns.push_back(extra);
            if (before) CHECK(is_goal(extended, c));
        }
    }
}
