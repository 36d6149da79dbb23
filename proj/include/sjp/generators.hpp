#pragma once

// Instance generators: the 3-SAT reduction, a brute-force satisfiability
// oracle, grid worlds, and seeded random systems.

#include "sjp/model.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <vector>

namespace sjp {

// 3-CNF with signed 1-based literals; duplicate literals inside a clause are
// allowed (they encode shorter clauses).
struct Cnf {
    int num_vars = 0;
    std::vector<std::array<int, 3>> clauses;
};

// Throws InvalidModel on out-of-range literals or an empty clause list.
void validate_cnf(const Cnf& cnf);

bool eval_cnf(const Cnf& cnf, const std::map<int, bool>& assignment);

struct Instance {
    SystemModel system;
    Configuration c0;
    GoalSet goal;
};

// Reduction from 3-SAT to stable-plan existence. Agent 1 walks a literal
// chain s0..s_{n+1} ending in an observe step that distinguishes whether
// agent 2 was flushed to the sink state o; agent 2 either moves straight to
// its goal state or detours to a clause state r_j that only a clause-j
// literal action can flush. |S1| = n+4, |S2| = m+3, |B| = 1.
Instance reduce_3sat(const Cnf& cnf);

// [a, lit_1..lit_n, observe] / [d, null..null]; throws PartialAssignment
// when the assignment does not cover every variable.
JointOpenPlan assignment_to_plan(const Cnf& cnf, const std::map<int, bool>& assignment);

enum class SatStatus { Satisfiable, Unsatisfiable };

struct SatResult {
    SatStatus status = SatStatus::Unsatisfiable;
    std::map<int, bool> assignment; // first satisfying assignment in fixed order

    bool satisfiable() const { return status == SatStatus::Satisfiable; }
};

// Exhaustive enumeration over all 2^n assignments in fixed order; guarded by
// TooManyVars for n > 24.
SatResult sat_brute(const Cnf& cnf);

struct GridPos {
    int row = 0;
    int col = 0;
};

// Two agents on a rows x cols grid with boundary-clipped moves
// {up,down,left,right,stay}, independent dynamics, a single environment
// state, and the composite goal (goal1, goal2, *).
Instance gen_grid(int rows, int cols, GridPos start1, GridPos start2, GridPos goal1,
                  GridPos goal2);

struct RandomSpec {
    int states1 = 3;
    int states2 = 3;
    int env_states = 2;
    int actions1 = 2;
    int actions2 = 2;
    int goal_patterns = 1;
    bool include_null = false; // declare null everywhere, transitions random
};

// Seeded deterministic generation: identical seed and spec yield an
// identical instance (and identical serialized text).
Instance gen_random(std::uint64_t seed, const RandomSpec& spec);

} // namespace sjp
