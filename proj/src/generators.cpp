#include "sjp/generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace sjp {

void validate_cnf(const Cnf& cnf) {
    if (cnf.num_vars < 1) fail(Err::InvalidModel, "cnf: at least one variable required");
    if (cnf.clauses.empty()) fail(Err::InvalidModel, "cnf: clause list is empty");
    for (const auto& cl : cnf.clauses)
        for (int lit : cl) {
            int v = std::abs(lit);
            if (v < 1 || v > cnf.num_vars)
                fail(Err::InvalidModel,
                     "cnf: literal " + std::to_string(lit) + " out of range");
        }
}

bool eval_cnf(const Cnf& cnf, const std::map<int, bool>& assignment) {
    for (const auto& cl : cnf.clauses) {
        bool sat = false;
        for (int lit : cl) {
            auto it = assignment.find(std::abs(lit));
            if (it == assignment.end())
                fail(Err::PartialAssignment,
                     "assignment misses variable " + std::to_string(std::abs(lit)));
            if (it->second == (lit > 0)) {
                sat = true;
                break;
            }
        }
        if (!sat) return false;
    }
    return true;
}

Instance reduce_3sat(const Cnf& cnf) {
    validate_cnf(cnf);
    const int n = cnf.num_vars;
    const int m = static_cast<int>(cnf.clauses.size());

    Instance inst;
    SystemModel& sys = inst.system;

    // Agent 1: the literal chain s0..s_{n+1} plus the observe outcomes p, q.
    std::vector<StateId> s(n + 2);
    for (int i = 0; i <= n + 1; ++i)
        s[i] = sys.add_state1("s" + std::to_string(i));
    StateId p = sys.add_state1("p");
    StateId q = sys.add_state1("q");

    // Agent 2: straight to the goal state, or a clause detour, or the sink.
    StateId r0 = sys.add_state2("r0");
    StateId rg = sys.add_state2("rg");
    std::vector<StateId> r(m + 1);
    for (int j = 1; j <= m; ++j)
        r[j] = sys.add_state2("r" + std::to_string(j));
    StateId o = sys.add_state2("o");

    StateId env = sys.add_env_state("e");

    ActionId act_a = sys.add_action1("a");
    std::vector<ActionId> pos(n + 1), neg(n + 1);
    for (int i = 1; i <= n; ++i) {
        pos[i] = sys.add_action1("pos_" + std::to_string(i));
        neg[i] = sys.add_action1("neg_" + std::to_string(i));
    }
    ActionId observe = sys.add_action1("observe");
    ActionId null1 = sys.add_action1(kNullActionName);

    ActionId act_d = sys.add_action2("d");
    std::vector<ActionId> dj(m + 1);
    for (int j = 1; j <= m; ++j)
        dj[j] = sys.add_action2("d_" + std::to_string(j));
    ActionId null2 = sys.add_action2(kNullActionName);

    sys.add_avail(AgentId::Agent1, s[0], act_a);
    for (int i = 1; i <= n; ++i) {
        sys.add_avail(AgentId::Agent1, s[i], pos[i]);
        sys.add_avail(AgentId::Agent1, s[i], neg[i]);
    }
    sys.add_avail(AgentId::Agent1, s[n + 1], observe);
    sys.add_avail(AgentId::Agent1, p, null1);
    sys.add_avail(AgentId::Agent1, q, null1);

    sys.add_avail(AgentId::Agent2, r0, act_d);
    for (int j = 1; j <= m; ++j) sys.add_avail(AgentId::Agent2, r0, dj[j]);
    sys.add_avail(AgentId::Agent2, rg, null2);
    for (int j = 1; j <= m; ++j) sys.add_avail(AgentId::Agent2, r[j], null2);
    sys.add_avail(AgentId::Agent2, o, null2);

    // Literal membership: does agent-1 action a1 satisfy a literal of clause j?
    auto hits_clause = [&](ActionId a1, int j) {
        for (int lit : cnf.clauses[j - 1]) {
            int v = std::abs(lit);
            if (lit > 0 && a1 == pos[v]) return true;
            if (lit < 0 && a1 == neg[v]) return true;
        }
        return false;
    };

    auto next1 = [&](StateId s1, StateId s2, ActionId a1) -> StateId {
        if (a1 == act_a) return s[1];
        for (int i = 1; i <= n; ++i)
            if (a1 == pos[i] || a1 == neg[i]) return s[i + 1];
        if (a1 == observe) return s2 == o ? q : p;
        return s1; // null in p or q
    };
    auto next2 = [&](StateId s2, ActionId a1, ActionId a2) -> StateId {
        if (s2 == r0) {
            if (a2 == act_d) return rg;
            for (int j = 1; j <= m; ++j)
                if (a2 == dj[j]) return r[j];
        }
        for (int j = 1; j <= m; ++j)
            if (s2 == r[j]) return hits_clause(a1, j) ? o : r[j];
        return s2; // rg and o absorb
    };

    sys.finalize();
    for (int ci = 0; ci < sys.config_count(); ++ci) {
        Configuration c = sys.config_at(ci);
        for (ActionId a1 : sys.avail(AgentId::Agent1, c.s1))
            for (ActionId a2 : sys.avail(AgentId::Agent2, c.s2))
                sys.add_row(c.s1, c.s2, c.b, a1, a2,
                            {next1(c.s1, c.s2, a1), next2(c.s2, a1, a2), env});
    }
    sys.finalize();

    inst.c0 = {s[0], r0, env};
    inst.goal.patterns.push_back(GoalPattern{s[1], rg, env});
    return inst;
}

JointOpenPlan assignment_to_plan(const Cnf& cnf, const std::map<int, bool>& assignment) {
    validate_cnf(cnf);
    for (int v = 1; v <= cnf.num_vars; ++v)
        if (!assignment.count(v))
            fail(Err::PartialAssignment,
                 "assignment misses variable " + std::to_string(v));

    // Action ids in the reduced system are positional; rebuild them here so
    // the plan can be produced without the instance at hand.
    Instance inst = reduce_3sat(cnf);
    const SystemModel& sys = inst.system;
    JointOpenPlan plan;
    plan.seq1.push_back(*sys.find_action(AgentId::Agent1, "a"));
    for (int v = 1; v <= cnf.num_vars; ++v) {
        const std::string name =
            (assignment.at(v) ? "pos_" : "neg_") + std::to_string(v);
        plan.seq1.push_back(*sys.find_action(AgentId::Agent1, name));
    }
    plan.seq1.push_back(*sys.find_action(AgentId::Agent1, "observe"));
    ActionId d = *sys.find_action(AgentId::Agent2, "d");
    ActionId null2 = *sys.find_action(AgentId::Agent2, kNullActionName);
    plan.seq2.push_back(d);
    for (int i = 0; i <= cnf.num_vars; ++i) plan.seq2.push_back(null2);
    return plan;
}

SatResult sat_brute(const Cnf& cnf) {
    validate_cnf(cnf);
    if (cnf.num_vars > 24)
        fail(Err::TooManyVars, "brute-force satisfiability capped at 24 variables");
    const int n = cnf.num_vars;
    SatResult result;
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
        std::map<int, bool> assignment;
        for (int v = 1; v <= n; ++v) assignment[v] = (bits >> (v - 1)) & 1u;
        if (eval_cnf(cnf, assignment)) {
            result.status = SatStatus::Satisfiable;
            result.assignment = std::move(assignment);
            return result;
        }
    }
    return result;
}

Instance gen_grid(int rows, int cols, GridPos start1, GridPos start2, GridPos goal1,
                  GridPos goal2) {
    if (rows < 1 || cols < 1) fail(Err::OutOfRange, "grid must be at least 1x1");
    auto in_range = [&](GridPos p) {
        return p.row >= 0 && p.row < rows && p.col >= 0 && p.col < cols;
    };
    for (GridPos p : {start1, start2, goal1, goal2})
        if (!in_range(p)) fail(Err::OutOfRange, "grid position out of range");

    Instance inst;
    SystemModel& sys = inst.system;
    auto cell_name = [](GridPos p) {
        return "r" + std::to_string(p.row) + "c" + std::to_string(p.col);
    };
    std::vector<std::vector<StateId>> cells1(rows, std::vector<StateId>(cols));
    std::vector<std::vector<StateId>> cells2(rows, std::vector<StateId>(cols));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            cells1[r][c] = sys.add_state1(cell_name({r, c}));
            cells2[r][c] = sys.add_state2(cell_name({r, c}));
        }
    StateId env = sys.add_env_state("e");

    const char* names[5] = {"up", "down", "left", "right", "stay"};
    const int dr[5] = {-1, 1, 0, 0, 0};
    const int dc[5] = {0, 0, -1, 1, 0};
    ActionId a1[5], a2[5];
    for (int i = 0; i < 5; ++i) {
        a1[i] = sys.add_action1(names[i]);
        a2[i] = sys.add_action2(names[i]);
    }
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            for (int i = 0; i < 5; ++i) {
                sys.add_avail(AgentId::Agent1, cells1[r][c], a1[i]);
                sys.add_avail(AgentId::Agent2, cells2[r][c], a2[i]);
            }

    auto moved = [&](int r, int c, int i) {
        int nr = std::clamp(r + dr[i], 0, rows - 1);
        int nc = std::clamp(c + dc[i], 0, cols - 1);
        return GridPos{nr, nc};
    };
    for (int r1 = 0; r1 < rows; ++r1)
        for (int c1 = 0; c1 < cols; ++c1)
            for (int r2 = 0; r2 < rows; ++r2)
                for (int c2 = 0; c2 < cols; ++c2)
                    for (int i = 0; i < 5; ++i)
                        for (int j = 0; j < 5; ++j) {
                            GridPos p1 = moved(r1, c1, i);
                            GridPos p2 = moved(r2, c2, j);
                            sys.add_row(cells1[r1][c1], cells2[r2][c2], env, a1[i],
                                        a2[j],
                                        {cells1[p1.row][p1.col],
                                         cells2[p2.row][p2.col], env});
                        }
    sys.finalize();

    inst.c0 = {cells1[start1.row][start1.col], cells2[start2.row][start2.col], env};
    inst.goal.patterns.push_back(GoalPattern{cells1[goal1.row][goal1.col],
                                             cells2[goal2.row][goal2.col],
                                             std::nullopt});
    return inst;
}

namespace {

// Bounded sampling kept free of distribution classes so that identical seeds
// give identical instances on any platform.
std::uint64_t rng_below(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

} // namespace

Instance gen_random(std::uint64_t seed, const RandomSpec& spec) {
    if (spec.states1 < 1 || spec.states2 < 1 || spec.env_states < 1 ||
        spec.actions1 < 1 || spec.actions2 < 1 || spec.goal_patterns < 1)
        fail(Err::OutOfRange, "random spec sizes must be positive");

    std::mt19937_64 rng(seed);
    Instance inst;
    SystemModel& sys = inst.system;
    for (int i = 0; i < spec.states1; ++i) sys.add_state1("u" + std::to_string(i));
    for (int i = 0; i < spec.states2; ++i) sys.add_state2("v" + std::to_string(i));
    for (int i = 0; i < spec.env_states; ++i) sys.add_env_state("e" + std::to_string(i));
    for (int i = 0; i < spec.actions1; ++i) sys.add_action1("f" + std::to_string(i));
    for (int i = 0; i < spec.actions2; ++i) sys.add_action2("g" + std::to_string(i));
    std::optional<ActionId> null1, null2;
    if (spec.include_null) {
        null1 = sys.add_action1(kNullActionName);
        null2 = sys.add_action2(kNullActionName);
    }

    // Random nonempty availability subsets; null (when present) everywhere.
    for (int s = 0; s < spec.states1; ++s) {
        sys.add_avail(AgentId::Agent1, s,
                      static_cast<ActionId>(rng_below(rng, spec.actions1)));
        for (ActionId a = 0; a < spec.actions1; ++a)
            if (rng_below(rng, 2) == 0) sys.add_avail(AgentId::Agent1, s, a);
        if (null1) sys.add_avail(AgentId::Agent1, s, *null1);
    }
    for (int s = 0; s < spec.states2; ++s) {
        sys.add_avail(AgentId::Agent2, s,
                      static_cast<ActionId>(rng_below(rng, spec.actions2)));
        for (ActionId a = 0; a < spec.actions2; ++a)
            if (rng_below(rng, 2) == 0) sys.add_avail(AgentId::Agent2, s, a);
        if (null2) sys.add_avail(AgentId::Agent2, s, *null2);
    }

    sys.finalize();
    for (int ci = 0; ci < sys.config_count(); ++ci) {
        Configuration c = sys.config_at(ci);
        for (ActionId a1 : sys.avail(AgentId::Agent1, c.s1))
            for (ActionId a2 : sys.avail(AgentId::Agent2, c.s2)) {
                Configuration image{
                    static_cast<StateId>(rng_below(rng, spec.states1)),
                    static_cast<StateId>(rng_below(rng, spec.states2)),
                    static_cast<StateId>(rng_below(rng, spec.env_states))};
                sys.add_row(c.s1, c.s2, c.b, a1, a2, image);
            }
    }
    sys.finalize();

    inst.c0 = {static_cast<StateId>(rng_below(rng, spec.states1)),
               static_cast<StateId>(rng_below(rng, spec.states2)),
               static_cast<StateId>(rng_below(rng, spec.env_states))};
    for (int i = 0; i < spec.goal_patterns; ++i) {
        GoalPattern pat;
        if (rng_below(rng, 4) != 0)
            pat.s1 = static_cast<StateId>(rng_below(rng, spec.states1));
        if (rng_below(rng, 4) != 0)
            pat.s2 = static_cast<StateId>(rng_below(rng, spec.states2));
        if (rng_below(rng, 2) != 0)
            pat.b = static_cast<StateId>(rng_below(rng, spec.env_states));
        inst.goal.patterns.push_back(pat);
    }
    return inst;
}

} // namespace sjp
