#pragma once

// Core model for two-agent transition systems: states, actions, per-state
// availability, a deterministic joint transition function, configurations,
// goals, open joint plans and their execution.

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sjp {

using StateId = int;
using ActionId = int;

enum class AgentId : int { Agent1 = 1, Agent2 = 2 };

inline AgentId other(AgentId a) {
    return a == AgentId::Agent1 ? AgentId::Agent2 : AgentId::Agent1;
}

inline int agent_number(AgentId a) { return a == AgentId::Agent1 ? 1 : 2; }

enum class Err {
    UnavailableAction,
    UndefinedTransition,
    EmptyPlan,
    NotEfficient,
    BudgetExceeded,
    TooManyVars,
    PartialAssignment,
    OutOfRange,
    MissingBranch,
    DanglingNodeRef,
    NullRequired,
    ObservationOutOfRange,
    LengthMismatch,
    MalformedEncoding,
    WindowExplosion,
    Parse,
    InvalidModel,
    Usage,
};

class SjpError : public std::runtime_error {
public:
    SjpError(Err kind, std::string msg)
        : std::runtime_error(std::move(msg)), kind_(kind) {}
    Err kind() const { return kind_; }

private:
    Err kind_;
};

[[noreturn]] void fail(Err kind, const std::string& msg);

// The reserved action name. Never implicitly available: a model that wants
// null behavior (crash analysis, halt padding) must declare it and give it
// transitions like any other action.
inline constexpr const char* kNullActionName = "null";

struct Configuration {
    StateId s1 = 0;
    StateId s2 = 0;
    StateId b = 0;

    friend bool operator==(const Configuration&, const Configuration&) = default;
    friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

// One authored transition entry. Kept as written so validate_system can
// report duplicates and gaps; the compiled lookup table is built separately.
struct TransitionRow {
    StateId s1 = 0;
    StateId s2 = 0;
    StateId b = 0;
    ActionId a1 = 0;
    ActionId a2 = 0;
    Configuration image;
    int line = 0; // source line when parsed from text, 0 otherwise
};

class SystemModel {
public:
    std::vector<std::string> states1, states2, env_states;
    std::vector<std::string> actions1, actions2;
    std::vector<std::vector<ActionId>> avail1, avail2; // indexed by own state
    std::vector<TransitionRow> rows;

    // Declaration helpers used by parsers, generators and tests. Adding a
    // state starts it with an empty availability set; validate_system flags
    // those that are never filled.
    StateId add_state1(const std::string& name);
    StateId add_state2(const std::string& name);
    StateId add_env_state(const std::string& name);
    ActionId add_action1(const std::string& name);
    ActionId add_action2(const std::string& name);
    void add_avail(AgentId agent, StateId s, ActionId a);
    void add_row(StateId s1, StateId s2, StateId b, ActionId a1, ActionId a2,
                 Configuration image, int line = 0);

    // Compiles the dense transition table. Must be called after the last
    // mutation and before any lookup/step. First row wins on duplicates;
    // validate_system reports conflicting duplicates separately.
    void finalize();
    bool finalized() const { return finalized_; }

    std::optional<StateId> find_state(AgentId agent, std::string_view name) const;
    std::optional<StateId> find_env_state(std::string_view name) const;
    std::optional<ActionId> find_action(AgentId agent, std::string_view name) const;
    std::optional<ActionId> null_action(AgentId agent) const;

    int n1() const { return static_cast<int>(states1.size()); }
    int n2() const { return static_cast<int>(states2.size()); }
    int nb() const { return static_cast<int>(env_states.size()); }
    int na1() const { return static_cast<int>(actions1.size()); }
    int na2() const { return static_cast<int>(actions2.size()); }

    int config_count() const { return n1() * n2() * nb(); }
    int config_index(const Configuration& c) const {
        return (c.s1 * n2() + c.s2) * nb() + c.b;
    }
    Configuration config_at(int idx) const {
        Configuration c;
        c.b = idx % nb();
        idx /= nb();
        c.s2 = idx % n2();
        c.s1 = idx / n2();
        return c;
    }
    bool valid_config(const Configuration& c) const {
        return c.s1 >= 0 && c.s1 < n1() && c.s2 >= 0 && c.s2 < n2() &&
               c.b >= 0 && c.b < nb();
    }

    const std::vector<ActionId>& avail(AgentId agent, StateId s) const;
    bool is_available(AgentId agent, StateId s, ActionId a) const;

    // Compiled transition lookup: packed image index, or -1 when no row
    // covers the key. Availability is not checked here.
    int lookup(const Configuration& c, ActionId a1, ActionId a2) const;

    const std::string& state_name(AgentId agent, StateId s) const;
    const std::string& env_name(StateId b) const;
    const std::string& action_name(AgentId agent, ActionId a) const;
    std::string config_name(const Configuration& c) const;

    // Structural equality of the compiled model (names, availability and the
    // transition function; authored row order is irrelevant).
    bool same_model(const SystemModel& o) const;

private:
    std::unordered_map<std::string, StateId> idx_states1_, idx_states2_, idx_env_;
    std::unordered_map<std::string, ActionId> idx_actions1_, idx_actions2_;
    std::vector<int32_t> table_;
    bool finalized_ = false;

    long long key_of(const Configuration& c, ActionId a1, ActionId a2) const {
        return (static_cast<long long>(config_index(c)) * na1() + a1) * na2() + a2;
    }
    friend std::vector<struct ModelDefect> validate_system(const SystemModel&);
};

enum class DefectKind {
    MissingTransition,
    NondeterministicTransition,
    JunkTransition,
    UndeclaredId,
    EmptyAvailability,
};

struct ModelDefect {
    DefectKind kind;
    std::string detail; // names the offending key
};

// Empty result iff every model invariant holds: availability sets nonempty,
// all ids declared, the transition relation total over available action
// pairs, deterministic, and free of rows outside the availability sets.
std::vector<ModelDefect> validate_system(const SystemModel& sys);

std::string defect_to_string(const ModelDefect& d);

// Deterministic one-step successor. Throws UnavailableAction when an agent's
// action is not available in its current state, UndefinedTransition when the
// model misses the key (a totality violation, reported, never absorbed).
Configuration step(const SystemModel& sys, const Configuration& c, ActionId a1,
                   ActionId a2);

struct GoalPattern {
    std::optional<StateId> s1, s2, b; // nullopt = wildcard
};

struct GoalSet {
    std::vector<GoalPattern> patterns;
};

bool is_goal(const GoalSet& goal, const Configuration& c);

// Per-configuration goal membership, indexed by config_index.
std::vector<char> goal_mask(const SystemModel& sys, const GoalSet& goal);

struct JointAction {
    ActionId a1 = 0;
    ActionId a2 = 0;
    friend bool operator==(const JointAction&, const JointAction&) = default;
};

// Equal-length action sequences, one joint action per step.
struct JointOpenPlan {
    std::vector<ActionId> seq1, seq2;

    int length() const { return static_cast<int>(seq1.size()); }
    JointAction at(int step) const { return {seq1[step], seq2[step]}; }
};

struct Trajectory {
    std::vector<Configuration> configs;  // length steps + 1
    std::vector<JointAction> actions;    // length steps
    std::optional<int> goal_visited;     // earliest matching index, when a goal was given

    int steps() const { return static_cast<int>(actions.size()); }
};

// Deterministic forward simulation; fails fast with the step index on
// availability and totality violations. Rejects zero-length plans.
Trajectory execute_open(const SystemModel& sys, const Configuration& c0,
                        const JointOpenPlan& plan, const GoalSet* goal = nullptr);

enum class EfficiencyStatus { Efficient, GoalMissed, TooLong };

struct EfficiencyVerdict {
    EfficiencyStatus status = EfficiencyStatus::Efficient;
    Trajectory run; // honest run; empty when the length bound already fails

    bool efficient() const { return status == EfficiencyStatus::Efficient; }
};

// Efficient iff the honest run visits the goal at some index 0..t and the
// plan length t does not exceed |C| = |S1|*|S2|*|B|. Over-long plans are
// rejected without executing.
EfficiencyVerdict check_efficient(const SystemModel& sys, const Configuration& c0,
                                  const GoalSet& goal, const JointOpenPlan& plan);

const char* efficiency_status_name(EfficiencyStatus s);

} // namespace sjp
