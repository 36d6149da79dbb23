#pragma once

// Text formats: the line-oriented system description, open plan files,
// DIMACS CNF, and their serializers. Parse errors carry line numbers.

#include "sjp/generators.hpp"
#include "sjp/model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace sjp {

struct ParsedSystem {
    SystemModel system;
    std::vector<Configuration> initials; // one per `init` line, in file order
    GoalSet goal;
};

// Grammar (one declaration per line, `#` starts a comment):
//   agent1 states: <ids>      agent2 states: <ids>     env states: <ids>
//   agent1 actions: <ids>     agent2 actions: <ids>
//   avail1 <state>: <actions>            avail2 <state>: <actions>
//   trans <s1> <s2> <b> <a1> <a2> -> <s1'> <s2'> <b'>
//   init <s1> <s2> <b>                   (repeatable; defines C0)
//   goal <s1|*> <s2|*> <b|*>             (repeatable)
// The parsed model is validated; any defect aborts the parse.
ParsedSystem parse_system(std::string_view text);

std::string serialize_system(const SystemModel& sys,
                             const std::vector<Configuration>& initials,
                             const GoalSet& goal);

// Open plan files:
//   agent1: a b c
//   agent2: d e f
JointOpenPlan parse_plan(std::string_view text, const SystemModel& sys);
std::string serialize_plan(const JointOpenPlan& plan, const SystemModel& sys);

// DIMACS CNF; clauses with fewer than three literals are padded by literal
// repetition, longer clauses are rejected.
Cnf parse_dimacs(std::string_view text);
std::string serialize_dimacs(const Cnf& cnf);

} // namespace sjp
