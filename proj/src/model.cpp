#include "sjp/model.hpp"

#include <algorithm>
#include <sstream>

namespace sjp {

void fail(Err kind, const std::string& msg) { throw SjpError(kind, msg); }

namespace {

int add_name(std::vector<std::string>& names,
             std::unordered_map<std::string, int>& index,
             const std::string& name, const char* what) {
    if (auto it = index.find(name); it != index.end())
        fail(Err::InvalidModel, std::string("duplicate ") + what + " '" + name + "'");
    int id = static_cast<int>(names.size());
    names.push_back(name);
    index.emplace(name, id);
    return id;
}

} // namespace

StateId SystemModel::add_state1(const std::string& name) {
    StateId id = add_name(states1, idx_states1_, name, "agent-1 state");
    avail1.emplace_back();
    finalized_ = false;
    return id;
}

StateId SystemModel::add_state2(const std::string& name) {
    StateId id = add_name(states2, idx_states2_, name, "agent-2 state");
    avail2.emplace_back();
    finalized_ = false;
    return id;
}

StateId SystemModel::add_env_state(const std::string& name) {
    finalized_ = false;
    return add_name(env_states, idx_env_, name, "environment state");
}

ActionId SystemModel::add_action1(const std::string& name) {
    finalized_ = false;
    return add_name(actions1, idx_actions1_, name, "agent-1 action");
}

ActionId SystemModel::add_action2(const std::string& name) {
    finalized_ = false;
    return add_name(actions2, idx_actions2_, name, "agent-2 action");
}

void SystemModel::add_avail(AgentId agent, StateId s, ActionId a) {
    auto& av = agent == AgentId::Agent1 ? avail1 : avail2;
    if (s < 0 || s >= static_cast<int>(av.size()))
        fail(Err::OutOfRange, "avail: undeclared state id");
    auto& list = av[s];
    if (std::find(list.begin(), list.end(), a) == list.end()) list.push_back(a);
    finalized_ = false;
}

void SystemModel::add_row(StateId s1, StateId s2, StateId b, ActionId a1,
                          ActionId a2, Configuration image, int line) {
    rows.push_back(TransitionRow{s1, s2, b, a1, a2, image, line});
    finalized_ = false;
}

void SystemModel::finalize() {
    table_.assign(static_cast<size_t>(config_count()) * na1() * na2(), -1);
    for (const auto& r : rows) {
        Configuration c{r.s1, r.s2, r.b};
        if (!valid_config(c) || !valid_config(r.image)) continue; // reported by validate
        if (r.a1 < 0 || r.a1 >= na1() || r.a2 < 0 || r.a2 >= na2()) continue;
        auto key = key_of(c, r.a1, r.a2);
        if (table_[key] == -1) table_[key] = config_index(r.image);
    }
    finalized_ = true;
}

std::optional<StateId> SystemModel::find_state(AgentId agent,
                                               std::string_view name) const {
    const auto& idx = agent == AgentId::Agent1 ? idx_states1_ : idx_states2_;
    auto it = idx.find(std::string(name));
    if (it == idx.end()) return std::nullopt;
    return it->second;
}

std::optional<StateId> SystemModel::find_env_state(std::string_view name) const {
    auto it = idx_env_.find(std::string(name));
    if (it == idx_env_.end()) return std::nullopt;
    return it->second;
}

std::optional<ActionId> SystemModel::find_action(AgentId agent,
                                                 std::string_view name) const {
    const auto& idx = agent == AgentId::Agent1 ? idx_actions1_ : idx_actions2_;
    auto it = idx.find(std::string(name));
    if (it == idx.end()) return std::nullopt;
    return it->second;
}

std::optional<ActionId> SystemModel::null_action(AgentId agent) const {
    return find_action(agent, kNullActionName);
}

const std::vector<ActionId>& SystemModel::avail(AgentId agent, StateId s) const {
    const auto& av = agent == AgentId::Agent1 ? avail1 : avail2;
    if (s < 0 || s >= static_cast<int>(av.size()))
        fail(Err::OutOfRange, "avail: state id out of range");
    return av[s];
}

bool SystemModel::is_available(AgentId agent, StateId s, ActionId a) const {
    const auto& list = avail(agent, s);
    return std::find(list.begin(), list.end(), a) != list.end();
}

int SystemModel::lookup(const Configuration& c, ActionId a1, ActionId a2) const {
    if (!finalized_) fail(Err::InvalidModel, "model not finalized before lookup");
    return table_[key_of(c, a1, a2)];
}

const std::string& SystemModel::state_name(AgentId agent, StateId s) const {
    const auto& names = agent == AgentId::Agent1 ? states1 : states2;
    return names.at(s);
}

const std::string& SystemModel::env_name(StateId b) const { return env_states.at(b); }

const std::string& SystemModel::action_name(AgentId agent, ActionId a) const {
    const auto& names = agent == AgentId::Agent1 ? actions1 : actions2;
    return names.at(a);
}

std::string SystemModel::config_name(const Configuration& c) const {
    return "(" + states1.at(c.s1) + "," + states2.at(c.s2) + "," +
           env_states.at(c.b) + ")";
}

bool SystemModel::same_model(const SystemModel& o) const {
    if (states1 != o.states1 || states2 != o.states2 || env_states != o.env_states ||
        actions1 != o.actions1 || actions2 != o.actions2)
        return false;
    auto norm = [](std::vector<std::vector<ActionId>> av) {
        for (auto& v : av) std::sort(v.begin(), v.end());
        return av;
    };
    if (norm(avail1) != norm(o.avail1) || norm(avail2) != norm(o.avail2)) return false;
    if (!finalized_ || !o.finalized_)
        fail(Err::InvalidModel, "same_model requires finalized models");
    return table_ == o.table_;
}

namespace {

std::string key_name(const SystemModel& sys, const Configuration& c, ActionId a1,
                     ActionId a2) {
    return sys.config_name(c) + "+(" + sys.action_name(AgentId::Agent1, a1) + "," +
           sys.action_name(AgentId::Agent2, a2) + ")";
}

} // namespace

std::vector<ModelDefect> validate_system(const SystemModel& sys) {
    std::vector<ModelDefect> defects;
    auto add = [&](DefectKind k, std::string d) {
        defects.push_back(ModelDefect{k, std::move(d)});
    };

    if (sys.states1.empty() || sys.states2.empty() || sys.env_states.empty())
        add(DefectKind::UndeclaredId, "a state component set is empty");

    for (int s = 0; s < sys.n1(); ++s)
        if (sys.avail1[s].empty())
            add(DefectKind::EmptyAvailability, "agent-1 state '" + sys.states1[s] + "'");
    for (int s = 0; s < sys.n2(); ++s)
        if (sys.avail2[s].empty())
            add(DefectKind::EmptyAvailability, "agent-2 state '" + sys.states2[s] + "'");

    for (int s = 0; s < sys.n1(); ++s)
        for (ActionId a : sys.avail1[s])
            if (a < 0 || a >= sys.na1())
                add(DefectKind::UndeclaredId,
                    "avail1 of '" + sys.states1[s] + "' references unknown action");
    for (int s = 0; s < sys.n2(); ++s)
        for (ActionId a : sys.avail2[s])
            if (a < 0 || a >= sys.na2())
                add(DefectKind::UndeclaredId,
                    "avail2 of '" + sys.states2[s] + "' references unknown action");

    // Row-level checks: declared ids, availability membership, determinism.
    std::unordered_map<long long, Configuration> seen;
    for (const auto& r : sys.rows) {
        Configuration c{r.s1, r.s2, r.b};
        if (!sys.valid_config(c) || !sys.valid_config(r.image) || r.a1 < 0 ||
            r.a1 >= sys.na1() || r.a2 < 0 || r.a2 >= sys.na2()) {
            add(DefectKind::UndeclaredId, "transition row references undeclared ids");
            continue;
        }
        if (!sys.is_available(AgentId::Agent1, r.s1, r.a1) ||
            !sys.is_available(AgentId::Agent2, r.s2, r.a2)) {
            add(DefectKind::JunkTransition, key_name(sys, c, r.a1, r.a2));
            continue;
        }
        long long key = (static_cast<long long>(sys.config_index(c)) * sys.na1() + r.a1) *
                            sys.na2() + r.a2;
        auto [it, inserted] = seen.emplace(key, r.image);
        if (!inserted && !(it->second == r.image))
            add(DefectKind::NondeterministicTransition, key_name(sys, c, r.a1, r.a2));
    }

    // Totality over every configuration and available action pair.
    for (int ci = 0; ci < sys.config_count(); ++ci) {
        Configuration c = sys.config_at(ci);
        for (ActionId a1 : sys.avail1[c.s1])
            for (ActionId a2 : sys.avail2[c.s2]) {
                long long key =
                    (static_cast<long long>(ci) * sys.na1() + a1) * sys.na2() + a2;
                if (!seen.count(key))
                    add(DefectKind::MissingTransition, key_name(sys, c, a1, a2));
            }
    }
    return defects;
}

std::string defect_to_string(const ModelDefect& d) {
    switch (d.kind) {
        case DefectKind::MissingTransition: return "missing transition " + d.detail;
        case DefectKind::NondeterministicTransition:
            return "nondeterministic transition " + d.detail;
        case DefectKind::JunkTransition:
            return "transition outside availability " + d.detail;
        case DefectKind::UndeclaredId: return "undeclared id: " + d.detail;
        case DefectKind::EmptyAvailability: return "empty availability: " + d.detail;
    }
    return "unknown defect";
}

Configuration step(const SystemModel& sys, const Configuration& c, ActionId a1,
                   ActionId a2) {
    if (!sys.valid_config(c)) fail(Err::OutOfRange, "step: configuration out of range");
    if (a1 < 0 || a1 >= sys.na1() || a2 < 0 || a2 >= sys.na2())
        fail(Err::OutOfRange, "step: action id out of range");
    if (!sys.is_available(AgentId::Agent1, c.s1, a1))
        fail(Err::UnavailableAction, "action '" + sys.action_name(AgentId::Agent1, a1) +
                                         "' not available to agent 1 in state '" +
                                         sys.state_name(AgentId::Agent1, c.s1) + "'");
    if (!sys.is_available(AgentId::Agent2, c.s2, a2))
        fail(Err::UnavailableAction, "action '" + sys.action_name(AgentId::Agent2, a2) +
                                         "' not available to agent 2 in state '" +
                                         sys.state_name(AgentId::Agent2, c.s2) + "'");
    int img = sys.lookup(c, a1, a2);
    if (img < 0)
        fail(Err::UndefinedTransition,
             "model defines no transition for " + key_name(sys, c, a1, a2));
    return sys.config_at(img);
}

bool is_goal(const GoalSet& goal, const Configuration& c) {
    for (const auto& p : goal.patterns) {
        if (p.s1 && *p.s1 != c.s1) continue;
        if (p.s2 && *p.s2 != c.s2) continue;
        if (p.b && *p.b != c.b) continue;
        return true;
    }
    return false;
}

std::vector<char> goal_mask(const SystemModel& sys, const GoalSet& goal) {
    std::vector<char> mask(sys.config_count(), 0);
    for (int ci = 0; ci < sys.config_count(); ++ci)
        mask[ci] = is_goal(goal, sys.config_at(ci)) ? 1 : 0;
    return mask;
}

Trajectory execute_open(const SystemModel& sys, const Configuration& c0,
                        const JointOpenPlan& plan, const GoalSet* goal) {
    if (plan.seq1.size() != plan.seq2.size())
        fail(Err::LengthMismatch, "joint plan sequences differ in length");
    if (plan.length() == 0) fail(Err::EmptyPlan, "zero-length plan");
    if (!sys.valid_config(c0)) fail(Err::OutOfRange, "initial configuration invalid");

    Trajectory tr;
    tr.configs.push_back(c0);
    if (goal && is_goal(*goal, c0)) tr.goal_visited = 0;
    Configuration c = c0;
    for (int u = 0; u < plan.length(); ++u) {
        JointAction ja = plan.at(u);
        try {
            c = step(sys, c, ja.a1, ja.a2);
        } catch (const SjpError& e) {
            fail(e.kind(), "step " + std::to_string(u) + ": " + e.what());
        }
        tr.configs.push_back(c);
        tr.actions.push_back(ja);
        if (goal && !tr.goal_visited && is_goal(*goal, c)) tr.goal_visited = u + 1;
    }
    return tr;
}

EfficiencyVerdict check_efficient(const SystemModel& sys, const Configuration& c0,
                                  const GoalSet& goal, const JointOpenPlan& plan) {
    EfficiencyVerdict v;
    if (plan.length() > sys.config_count()) {
        // Over-long regardless of where the run would go.
        v.status = EfficiencyStatus::TooLong;
        return v;
    }
    v.run = execute_open(sys, c0, plan, &goal);
    v.status = v.run.goal_visited ? EfficiencyStatus::Efficient
                                  : EfficiencyStatus::GoalMissed;
    return v;
}

const char* efficiency_status_name(EfficiencyStatus s) {
    switch (s) {
        case EfficiencyStatus::Efficient: return "efficient";
        case EfficiencyStatus::GoalMissed: return "goal-missed";
        case EfficiencyStatus::TooLong: return "too-long";
    }
    return "?";
}

} // namespace sjp
