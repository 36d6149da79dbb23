#pragma once

// Canonical hand-built systems used across the test suites. Each builder
// returns a finalized, defect-free model; transition keys not spelled out
// explicitly self-loop on every component.

#include "sjp/conditional.hpp"
#include "sjp/model.hpp"

#include <string>
#include <vector>

namespace sjp::test {

struct Fixture {
    SystemModel sys;
    Configuration c0;
    GoalSet goal;
    JointOpenPlan plan; // the nominal joint plan exercised by the suite
};

// Adds a full self-loop row for every available key not yet covered.
inline void fill_selfloops(SystemModel& m) {
    m.finalize();
    struct Missing {
        Configuration c;
        ActionId a1, a2;
    };
    std::vector<Missing> missing;
    for (int ci = 0; ci < m.config_count(); ++ci) {
        Configuration c = m.config_at(ci);
        for (ActionId a1 : m.avail(AgentId::Agent1, c.s1))
            for (ActionId a2 : m.avail(AgentId::Agent2, c.s2))
                if (m.lookup(c, a1, a2) < 0) missing.push_back({c, a1, a2});
    }
    for (const Missing& k : missing) m.add_row(k.c.s1, k.c.s2, k.c.b, k.a1, k.a2, k.c);
    m.finalize();
}

// Two agent-1 states, agent 2 may take a harmless wrong turn: the deviation
// 'bad' leaves agent 1's state unchanged, so it goes undetected.
inline Fixture sys_a() {
    Fixture f;
    SystemModel& m = f.sys;
    StateId u0 = m.add_state1("u0"), u1 = m.add_state1("u1");
    StateId v0 = m.add_state2("v0"), v1 = m.add_state2("v1");
    StateId e = m.add_env_state("e");
    ActionId go = m.add_action1("go");
    ActionId good = m.add_action2("good"), bad = m.add_action2("bad");
    m.add_avail(AgentId::Agent1, u0, go);
    m.add_avail(AgentId::Agent1, u1, go);
    m.add_avail(AgentId::Agent2, v0, good);
    m.add_avail(AgentId::Agent2, v0, bad);
    m.add_avail(AgentId::Agent2, v1, good);
    m.add_row(u0, v0, e, go, good, {u1, v1, e});
    m.add_row(u0, v0, e, go, bad, {u1, v0, e});
    fill_selfloops(m);
    f.c0 = {u0, v0, e};
    f.goal.patterns.push_back({u1, v1, e});
    f.plan.seq1 = {go};
    f.plan.seq2 = {good};
    return f;
}

// SYS-A plus a third agent-1 state: the wrong turn now diverts agent 1 to
// u2, so the deviation is detected immediately.
inline Fixture sys_b() {
    Fixture f;
    SystemModel& m = f.sys;
    StateId u0 = m.add_state1("u0"), u1 = m.add_state1("u1"), u2 = m.add_state1("u2");
    StateId v0 = m.add_state2("v0"), v1 = m.add_state2("v1");
    StateId e = m.add_env_state("e");
    ActionId go = m.add_action1("go");
    ActionId good = m.add_action2("good"), bad = m.add_action2("bad");
    for (StateId u : {u0, u1, u2}) m.add_avail(AgentId::Agent1, u, go);
    m.add_avail(AgentId::Agent2, v0, good);
    m.add_avail(AgentId::Agent2, v0, bad);
    m.add_avail(AgentId::Agent2, v1, good);
    m.add_row(u0, v0, e, go, good, {u1, v1, e});
    m.add_row(u0, v0, e, go, bad, {u2, v0, e});
    fill_selfloops(m);
    f.c0 = {u0, v0, e};
    f.goal.patterns.push_back({u1, v1, e});
    f.plan.seq1 = {go};
    f.plan.seq2 = {good};
    return f;
}

// SYS-A with the deviation removed: singleton availability everywhere for
// agent 2, so the honest run is forced.
inline Fixture sys_c() {
    Fixture f;
    SystemModel& m = f.sys;
    StateId u0 = m.add_state1("u0"), u1 = m.add_state1("u1");
    StateId v0 = m.add_state2("v0"), v1 = m.add_state2("v1");
    StateId e = m.add_env_state("e");
    ActionId go = m.add_action1("go");
    ActionId good = m.add_action2("good");
    m.add_avail(AgentId::Agent1, u0, go);
    m.add_avail(AgentId::Agent1, u1, go);
    m.add_avail(AgentId::Agent2, v0, good);
    m.add_avail(AgentId::Agent2, v1, good);
    m.add_row(u0, v0, e, go, good, {u1, v1, e});
    fill_selfloops(m);
    f.c0 = {u0, v0, e};
    f.goal.patterns.push_back({u1, v1, e});
    f.plan.seq1 = {go};
    f.plan.seq2 = {good};
    return f;
}

// A step-0 deviation leaves agent 1's step-1 state nominal; the divergence
// shows up only at step 2 (detected at 2, not at 1).
inline Fixture sys_d() {
    Fixture f;
    SystemModel& m = f.sys;
    StateId u0 = m.add_state1("u0"), u1 = m.add_state1("u1");
    StateId u2 = m.add_state1("u2"), u3 = m.add_state1("u3");
    StateId v0 = m.add_state2("v0"), v1 = m.add_state2("v1"), v2 = m.add_state2("v2");
    StateId e = m.add_env_state("e");
    ActionId go = m.add_action1("go");
    ActionId good = m.add_action2("good"), bad = m.add_action2("bad");
    for (StateId u : {u0, u1, u2, u3}) m.add_avail(AgentId::Agent1, u, go);
    m.add_avail(AgentId::Agent2, v0, good);
    m.add_avail(AgentId::Agent2, v0, bad);
    m.add_avail(AgentId::Agent2, v1, good);
    m.add_avail(AgentId::Agent2, v2, good);
    m.add_row(u0, v0, e, go, good, {u1, v1, e});
    m.add_row(u0, v0, e, go, bad, {u1, v0, e});
    m.add_row(u1, v1, e, go, good, {u2, v2, e});
    m.add_row(u1, v0, e, go, good, {u3, v0, e});
    m.add_row(u1, v0, e, go, bad, {u3, v0, e});
    fill_selfloops(m);
    f.c0 = {u0, v0, e};
    f.goal.patterns.push_back({u2, v2, e});
    f.plan.seq1 = {go, go};
    f.plan.seq2 = {good, good};
    return f;
}

struct ConditionalFixture {
    SystemModel sys;
    InitialSet initials;
    GoalSet goal;
    ConditionalPlan plan1, plan2;
};

// Two possible environments; agent 1 learns the environment from its step-1
// state and must branch to reach the goal under both.
inline ConditionalFixture sys_e() {
    ConditionalFixture f;
    SystemModel& m = f.sys;
    StateId w0 = m.add_state1("w0"), wA = m.add_state1("wA"), wB = m.add_state1("wB");
    StateId wg = m.add_state1("wg"), wd = m.add_state1("wd");
    StateId z0 = m.add_state2("z0"), zg = m.add_state2("zg");
    StateId eA = m.add_env_state("eA"), eB = m.add_env_state("eB");
    ActionId mv = m.add_action1("m"), fa = m.add_action1("fa"), fb = m.add_action1("fb");
    ActionId n1 = m.add_action1("null");
    ActionId d = m.add_action2("d");
    ActionId n2 = m.add_action2("null");
    m.add_avail(AgentId::Agent1, w0, mv);
    m.add_avail(AgentId::Agent1, wA, fa);
    m.add_avail(AgentId::Agent1, wA, fb);
    m.add_avail(AgentId::Agent1, wB, fa);
    m.add_avail(AgentId::Agent1, wB, fb);
    m.add_avail(AgentId::Agent1, wg, n1);
    m.add_avail(AgentId::Agent1, wd, n1);
    m.add_avail(AgentId::Agent2, z0, d);
    m.add_avail(AgentId::Agent2, zg, n2);

    auto a2_next = [&](StateId s2, ActionId a2) {
        return a2 == d && s2 == z0 ? zg : s2;
    };
    auto a1_next = [&](StateId s1, StateId b, ActionId a1) {
        if (a1 == mv) return b == eA ? wA : wB;
        if (a1 == fa) return s1 == wA ? wg : wd;
        if (a1 == fb) return s1 == wB ? wg : wd;
        return s1;
    };
    m.finalize();
    for (int ci = 0; ci < m.config_count(); ++ci) {
        Configuration c = m.config_at(ci);
        for (ActionId a1 : m.avail(AgentId::Agent1, c.s1))
            for (ActionId a2 : m.avail(AgentId::Agent2, c.s2))
                m.add_row(c.s1, c.s2, c.b, a1, a2,
                          {a1_next(c.s1, c.b, a1), a2_next(c.s2, a2), c.b});
    }
    m.finalize();

    f.initials.configs = {{w0, z0, eA}, {w0, z0, eB}};
    f.goal.patterns.push_back({wg, zg, std::nullopt});

    // plan1: move, then finish on the branch the environment revealed.
    CPlanNode root{mv, {{wA, 1}, {wB, 2}}, std::nullopt};
    CPlanNode doA{fa, {}, kHalt};
    CPlanNode doB{fb, {}, kHalt};
    f.plan1.nodes = {root, doA, doB};
    f.plan1.root = 0;
    CPlanNode p2{d, {}, kHalt};
    f.plan2.nodes = {p2};
    f.plan2.root = 0;
    return f;
}

// The non-branching variant of sys_e's agent-1 plan: always plays fa.
inline ConditionalPlan sys_e_nonbranching_plan1(const ConditionalFixture& f) {
    ActionId mv = *f.sys.find_action(AgentId::Agent1, "m");
    ActionId fa = *f.sys.find_action(AgentId::Agent1, "fa");
    ConditionalPlan p;
    p.nodes = {CPlanNode{mv, {}, 1}, CPlanNode{fa, {}, kHalt}};
    p.root = 0;
    return p;
}

// Witness-confusion fixture: from one initial configuration a deviation can
// mimic the detector observations of the other initial's honest run while
// missing the goal. Stable for each singleton initial set, unstable for the
// pair.
inline ConditionalFixture sys_f() {
    ConditionalFixture f;
    SystemModel& m = f.sys;
    StateId w0 = m.add_state1("w0"), wA = m.add_state1("wA"), wB = m.add_state1("wB");
    StateId zA = m.add_state2("zA"), zB = m.add_state2("zB");
    StateId zg = m.add_state2("zg"), zx = m.add_state2("zx");
    StateId e = m.add_env_state("e");
    ActionId mv = m.add_action1("m");
    ActionId dA = m.add_action2("dA"), dB = m.add_action2("dB");
    for (StateId w : {w0, wA, wB}) m.add_avail(AgentId::Agent1, w, mv);
    for (StateId z : {zA, zB}) {
        m.add_avail(AgentId::Agent2, z, dA);
        m.add_avail(AgentId::Agent2, z, dB);
    }
    m.add_avail(AgentId::Agent2, zg, dA);
    m.add_avail(AgentId::Agent2, zx, dA);
    m.add_row(w0, zA, e, mv, dA, {wA, zg, e});
    m.add_row(w0, zA, e, mv, dB, {wB, zx, e});
    m.add_row(w0, zB, e, mv, dA, {wB, zg, e});
    m.add_row(w0, zB, e, mv, dB, {wB, zg, e});
    fill_selfloops(m);

    f.initials.configs = {{w0, zA, e}, {w0, zB, e}};
    f.goal.patterns.push_back({std::nullopt, zg, std::nullopt});
    f.plan1.nodes = {CPlanNode{mv, {}, kHalt}};
    f.plan1.root = 0;
    f.plan2.nodes = {CPlanNode{dA, {}, kHalt}};
    f.plan2.root = 0;
    return f;
}

} // namespace sjp::test
