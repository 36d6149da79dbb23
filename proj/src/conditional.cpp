#include "sjp/conditional.hpp"

#include "cursor_detail.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

namespace sjp {

using detail::Cursor;
using detail::null_or_throw;
using detail::own_state;

void validate_cplan(const ConditionalPlan& plan) {
    const int n = static_cast<int>(plan.nodes.size());
    auto check_ref = [&](int ref) {
        if (ref != kHalt && (ref < 0 || ref >= n))
            fail(Err::DanglingNodeRef, "conditional plan references unknown node " +
                                           std::to_string(ref));
    };
    check_ref(plan.root);
    for (const auto& node : plan.nodes) {
        for (const auto& [state, succ] : node.branches) check_ref(succ);
        if (node.default_branch) check_ref(*node.default_branch);
    }

    // Acyclicity by coloring; realized paths are then bounded by node count.
    std::vector<int> color(n, 0);
    std::vector<int> stack;
    for (int start = 0; start < n; ++start) {
        if (color[start]) continue;
        stack.push_back(start);
        while (!stack.empty()) {
            int v = stack.back();
            if (color[v] == 0) {
                color[v] = 1;
                auto push = [&](int succ) {
                    if (succ == kHalt) return;
                    if (color[succ] == 1)
                        fail(Err::MalformedEncoding, "conditional plan has a cycle");
                    if (color[succ] == 0) stack.push_back(succ);
                };
                for (const auto& [state, succ] : plan.nodes[v].branches) push(succ);
                if (plan.nodes[v].default_branch) push(*plan.nodes[v].default_branch);
            } else {
                color[v] = 2;
                stack.pop_back();
            }
        }
    }
}

ConditionalPlan lift_open_plan(const std::vector<ActionId>& seq) {
    ConditionalPlan plan;
    for (size_t i = 0; i < seq.size(); ++i) {
        CPlanNode node;
        node.action = seq[i];
        node.default_branch = i + 1 < seq.size() ? static_cast<int>(i + 1) : kHalt;
        plan.nodes.push_back(node);
    }
    plan.root = seq.empty() ? kHalt : 0;
    return plan;
}

InitialSet make_initial_set(const SystemModel& sys, std::vector<Configuration> configs) {
    if (configs.empty()) fail(Err::OutOfRange, "initial set is empty");
    for (const auto& c : configs)
        if (!sys.valid_config(c))
            fail(Err::OutOfRange, "initial set contains an invalid configuration");
    std::sort(configs.begin(), configs.end());
    configs.erase(std::unique(configs.begin(), configs.end()), configs.end());
    return InitialSet{std::move(configs)};
}

ConditionalRun run_conditional(const SystemModel& sys, const Configuration& c0,
                               const ConditionalPlan& plan1,
                               const ConditionalPlan& plan2, const GoalSet* goal) {
    validate_cplan(plan1);
    validate_cplan(plan2);
    if (!sys.valid_config(c0)) fail(Err::OutOfRange, "initial configuration invalid");

    ConditionalRun out;
    Trajectory& tr = out.traj;
    tr.configs.push_back(c0);
    if (goal && is_goal(*goal, c0)) tr.goal_visited = 0;

    Cursor cur1{plan1, AgentId::Agent1, plan1.root};
    Cursor cur2{plan2, AgentId::Agent2, plan2.root};
    if (!cur1.active()) cur1.halt_step = 0;
    if (!cur2.active()) cur2.halt_step = 0;

    Configuration c = c0;
    int step_idx = 0;
    while (cur1.active() || cur2.active()) {
        ActionId a1 = cur1.active() ? cur1.action()
                                    : null_or_throw(sys, AgentId::Agent1, c.s1);
        ActionId a2 = cur2.active() ? cur2.action()
                                    : null_or_throw(sys, AgentId::Agent2, c.s2);
        c = step(sys, c, a1, a2);
        ++step_idx;
        tr.configs.push_back(c);
        tr.actions.push_back(JointAction{a1, a2});
        if (goal && !tr.goal_visited && is_goal(*goal, c)) tr.goal_visited = step_idx;
        if (cur1.active()) cur1.advance(sys, c.s1, step_idx);
        if (cur2.active()) cur2.advance(sys, c.s2, step_idx);
    }
    out.halt1 = cur1.halt_step;
    out.halt2 = cur2.halt_step;
    return out;
}

Trajectory execute_conditional(const SystemModel& sys, const Configuration& c0,
                               const ConditionalPlan& plan1,
                               const ConditionalPlan& plan2, const GoalSet* goal) {
    return run_conditional(sys, c0, plan1, plan2, goal).traj;
}

IIEfficiencyVerdict verify_ii_efficiency(const SystemModel& sys, const InitialSet& c0s,
                                         const GoalSet& goal,
                                         const ConditionalPlan& plan1,
                                         const ConditionalPlan& plan2) {
    IIEfficiencyVerdict v;
    for (const Configuration& c0 : c0s.configs) {
        Trajectory tr = execute_conditional(sys, c0, plan1, plan2, &goal);
        if (tr.steps() > sys.config_count()) {
            v.efficient = false;
            v.status = EfficiencyStatus::TooLong;
            v.failing_c0 = c0;
            return v;
        }
        if (!tr.goal_visited) {
            v.efficient = false;
            v.status = EfficiencyStatus::GoalMissed;
            v.failing_c0 = c0;
            return v;
        }
    }
    return v;
}

namespace {

std::vector<StateId> detector_obs(const Trajectory& tr, AgentId detector) {
    std::vector<StateId> obs;
    obs.reserve(tr.configs.size());
    for (const auto& c : tr.configs) obs.push_back(own_state(c, detector));
    return obs;
}

} // namespace

StabilityVerdict verify_ii_stability(const SystemModel& sys, const InitialSet& c0s,
                                     const GoalSet& goal, const ConditionalPlan& plan1,
                                     const ConditionalPlan& plan2, AgentId deviator) {
    IIEfficiencyVerdict eff = verify_ii_efficiency(sys, c0s, goal, plan1, plan2);
    if (!eff.efficient)
        fail(Err::NotEfficient,
             std::string("conditional plan is not efficient: ") +
                 efficiency_status_name(eff.status));

    const AgentId detector = other(deviator);
    StabilityVerdict verdict;

    for (const Configuration& c0w : c0s.configs) {
        // The detector's behavior along any run it cannot distinguish from
        // this witness is fixed: same observations, same cursor path, same
        // actions. That reduces undetectability to a per-witness product
        // search.
        Trajectory witness = execute_conditional(sys, c0w, plan1, plan2, &goal);
        std::vector<StateId> wobs = detector_obs(witness, detector);
        std::vector<ActionId> wacts;
        for (const auto& ja : witness.actions)
            wacts.push_back(detector == AgentId::Agent1 ? ja.a1 : ja.a2);
        const int tw = witness.steps();

        for (const Configuration& c0a : c0s.configs) {
            if (own_state(c0a, detector) != wobs[0]) continue;
            if (is_goal(goal, c0a)) continue;

            // layers[u]: configurations reachable at step u under arbitrary
            // available deviator choices, filtered to runs the detector
            // cannot distinguish from the witness and that avoid the goal.
            struct Entry {
                Configuration config;
                int prev;
                ActionId dev_action;
            };
            std::vector<std::vector<Entry>> layers(tw + 1);
            layers[0].push_back(Entry{c0a, -1, 0});
            for (int u = 0; u < tw && !layers[u].empty(); ++u) {
                std::vector<char> seen(sys.config_count(), 0);
                for (int idx = 0; idx < static_cast<int>(layers[u].size()); ++idx) {
                    Configuration c = layers[u][idx].config;
                    for (ActionId e :
                         sys.avail(deviator, own_state(c, deviator))) {
                        Configuration next =
                            deviator == AgentId::Agent2
                                ? step(sys, c, wacts[u], e)
                                : step(sys, c, e, wacts[u]);
                        if (own_state(next, detector) != wobs[u + 1]) continue;
                        if (is_goal(goal, next)) continue;
                        int ni = sys.config_index(next);
                        if (seen[ni]) continue;
                        seen[ni] = 1;
                        layers[u + 1].push_back(Entry{next, idx, e});
                    }
                }
            }
            if (tw >= 0 && !layers[tw].empty()) {
                DeviationCounterexample cex;
                cex.deviator = deviator;
                cex.actual_c0 = c0a;
                cex.witness_c0 = c0w;
                // Reconstruct one undetected goal-avoiding run backward.
                std::vector<Entry> chain;
                int layer = tw, idx = 0;
                while (layer > 0) {
                    chain.push_back(layers[layer][idx]);
                    idx = layers[layer][idx].prev;
                    --layer;
                }
                std::reverse(chain.begin(), chain.end());
                cex.run.configs.push_back(c0a);
                for (int u = 0; u < tw; ++u) {
                    cex.deviator_actions.push_back(chain[u].dev_action);
                    cex.run.actions.push_back(
                        deviator == AgentId::Agent2
                            ? JointAction{wacts[u], chain[u].dev_action}
                            : JointAction{chain[u].dev_action, wacts[u]});
                    cex.run.configs.push_back(chain[u].config);
                }
                Trajectory honest_a = execute_conditional(sys, c0a, plan1, plan2);
                int first_dev = 0;
                for (size_t i = 1; i < cex.run.configs.size() &&
                                   i < honest_a.configs.size();
                     ++i)
                    if (!(cex.run.configs[i] == honest_a.configs[i])) {
                        first_dev = static_cast<int>(i) - 1;
                        break;
                    }
                cex.first_deviation_step = first_dev;
                verdict.stable = false;
                verdict.kind = UnstableKind::UndetectedDeviation;
                verdict.direction = deviator;
                verdict.counterexample = std::move(cex);
                return verdict;
            }
        }
    }
    return verdict;
}

DetectionMonitor::DetectionMonitor(const SystemModel& sys, const InitialSet& c0s,
                                   const ConditionalPlan& plan1,
                                   const ConditionalPlan& plan2, AgentId detector)
    : sys_(sys), detector_(detector) {
    for (const Configuration& c0 : c0s.configs) {
        Trajectory tr = execute_conditional(sys, c0, plan1, plan2);
        honest_obs_.push_back(detector_obs(tr, detector));
    }
    alive_.assign(honest_obs_.size(), 1);
}

std::optional<int> DetectionMonitor::feed(StateId observed) {
    const int ns = detector_ == AgentId::Agent1 ? sys_.n1() : sys_.n2();
    if (observed < 0 || observed >= ns)
        fail(Err::ObservationOutOfRange,
             "observed state id " + std::to_string(observed) + " out of range");
    if (detected_) {
        ++position_;
        return std::nullopt;
    }
    int u = position_++;
    int left = 0;
    for (size_t i = 0; i < honest_obs_.size(); ++i) {
        if (!alive_[i]) continue;
        if (u >= static_cast<int>(honest_obs_[i].size()) ||
            honest_obs_[i][u] != observed)
            alive_[i] = 0;
        else
            ++left;
    }
    if (left == 0) {
        detected_ = true;
        return u;
    }
    return std::nullopt;
}

int DetectionMonitor::candidates_left() const {
    int left = 0;
    for (char a : alive_)
        if (a) ++left;
    return left;
}

namespace {

// Hash-consed canonical form: equal subgraphs collapse to one node.
struct Canonicalizer {
    const ConditionalPlan& plan;
    std::vector<CPlanNode> canon;
    std::unordered_map<std::string, int> by_signature;
    std::vector<int> memo;

    explicit Canonicalizer(const ConditionalPlan& p)
        : plan(p), memo(p.nodes.size(), -2) {}

    int cons(int node) {
        if (node == kHalt) return kHalt;
        if (memo[node] != -2) return memo[node];
        const CPlanNode& n = plan.nodes[node];
        CPlanNode c;
        c.action = n.action;
        for (const auto& [state, succ] : n.branches) c.branches[state] = cons(succ);
        if (n.default_branch) c.default_branch = cons(*n.default_branch);

        std::ostringstream sig;
        sig << c.action;
        for (const auto& [state, succ] : c.branches) sig << ' ' << state << ':' << succ;
        if (c.default_branch) sig << " *:" << *c.default_branch;
        auto [it, inserted] =
            by_signature.emplace(sig.str(), static_cast<int>(canon.size()));
        if (inserted) canon.push_back(std::move(c));
        memo[node] = it->second;
        return it->second;
    }
};

struct CanonPlan {
    std::vector<CPlanNode> nodes;
    int root = kHalt;
};

CanonPlan canonicalize(const ConditionalPlan& plan) {
    validate_cplan(plan);
    Canonicalizer cz(plan);
    CanonPlan result;
    result.root = cz.cons(plan.root);
    result.nodes = std::move(cz.canon);
    return result;
}

// Deterministic output numbering: preorder from the root, branches in state
// order, default branch last; the shared halt leaf is numbered at the end.
void number_preorder(const CanonPlan& plan, int node, std::vector<int>& order,
                     std::vector<int>& numbered) {
    if (node == kHalt || numbered[node] >= 0) return;
    numbered[node] = static_cast<int>(order.size());
    order.push_back(node);
    for (const auto& [state, succ] : plan.nodes[node].branches)
        number_preorder(plan, succ, order, numbered);
    if (plan.nodes[node].default_branch)
        number_preorder(plan, *plan.nodes[node].default_branch, order, numbered);
}

} // namespace

std::string encode_cplan(const ConditionalPlan& plan, const SystemModel& sys,
                         AgentId agent) {
    CanonPlan canon = canonicalize(plan);
    std::vector<int> order;
    std::vector<int> numbered(canon.nodes.size(), -1);
    number_preorder(canon, canon.root, order, numbered);
    const int halt_id = static_cast<int>(order.size());

    std::ostringstream out;
    out << "root " << (canon.root == kHalt ? halt_id : numbered[canon.root]) << "\n";
    auto ref = [&](int succ) { return succ == kHalt ? halt_id : numbered[succ]; };
    for (int ci : order) {
        const CPlanNode& n = canon.nodes[ci];
        out << "node " << numbered[ci] << ": action " << sys.action_name(agent, n.action);
        for (const auto& [state, succ] : n.branches)
            out << "; on " << sys.state_name(agent, state) << " -> " << ref(succ);
        if (n.default_branch) out << "; on * -> " << ref(*n.default_branch);
        out << "\n";
    }
    out << "node " << halt_id << ": halt\n";
    return out.str();
}

int encoded_node_count(const ConditionalPlan& plan) {
    CanonPlan canon = canonicalize(plan);
    std::vector<int> order;
    std::vector<int> numbered(canon.nodes.size(), -1);
    number_preorder(canon, canon.root, order, numbered);
    return static_cast<int>(order.size()) + 1; // plus the shared halt leaf
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::string strip(std::string s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

} // namespace

ConditionalPlan decode_cplan(std::string_view text, const SystemModel& sys,
                             AgentId agent) {
    struct RawNode {
        std::string action; // empty = halt
        std::vector<std::pair<std::string, std::string>> branches; // state (or *), ref
        int line;
    };
    std::map<std::string, RawNode> raw;
    std::string root_ref;
    bool have_root = false;

    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
        line = strip(line);
        if (line.empty()) continue;
        auto diag = [&](const std::string& msg) {
            fail(Err::Parse, "line " + std::to_string(lineno) + ": " + msg);
        };
        if (line.rfind("root", 0) == 0) {
            auto toks = split_ws(line);
            if (toks.size() != 2) diag("expected 'root <id>'");
            root_ref = toks[1];
            have_root = true;
            continue;
        }
        if (line.rfind("node", 0) != 0) diag("expected 'node' or 'root'");
        auto colon = line.find(':');
        if (colon == std::string::npos) diag("missing ':' after node id");
        auto head = split_ws(line.substr(0, colon));
        if (head.size() != 2) diag("expected 'node <id>:'");
        std::string id = head[1];
        if (raw.count(id)) diag("duplicate node id '" + id + "'");

        RawNode node;
        node.line = lineno;
        std::string rest = line.substr(colon + 1);
        std::istringstream parts{rest};
        std::string part;
        bool first = true;
        while (std::getline(parts, part, ';')) {
            part = strip(part);
            if (part.empty()) continue;
            auto toks = split_ws(part);
            if (first) {
                first = false;
                if (toks.size() == 1 && toks[0] == "halt") {
                    node.action.clear();
                    continue;
                }
                if (toks.size() != 2 || toks[0] != "action")
                    diag("expected 'action <a>' or 'halt'");
                node.action = toks[1];
                continue;
            }
            if (toks.size() != 4 || toks[0] != "on" || toks[2] != "->")
                diag("expected 'on <state> -> <id>'");
            node.branches.emplace_back(toks[1], toks[3]);
        }
        if (first) diag("empty node body");
        raw.emplace(id, std::move(node));
    }
    if (!have_root) fail(Err::Parse, "conditional plan lacks a 'root' line");

    // Assign indices to non-halt nodes in file order (by line).
    std::vector<std::pair<std::string, const RawNode*>> ordered;
    for (const auto& [id, node] : raw) ordered.emplace_back(id, &node);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.second->line < b.second->line; });
    std::map<std::string, int> index;
    int next = 0;
    for (const auto& [id, node] : ordered)
        if (!node->action.empty()) index[id] = next++;

    auto resolve = [&](const std::string& ref, int line) -> int {
        auto it = raw.find(ref);
        if (it == raw.end())
            fail(Err::DanglingNodeRef, "line " + std::to_string(line) +
                                           ": unknown node id '" + ref + "'");
        if (it->second.action.empty()) return kHalt;
        return index.at(ref);
    };

    ConditionalPlan plan;
    plan.nodes.resize(next);
    for (const auto& [id, node] : ordered) {
        if (node->action.empty()) continue;
        CPlanNode out;
        auto action = sys.find_action(agent, node->action);
        if (!action)
            fail(Err::Parse, "line " + std::to_string(node->line) +
                                 ": unknown action '" + node->action + "'");
        out.action = *action;
        for (const auto& [state_tok, ref] : node->branches) {
            int succ = resolve(ref, node->line);
            if (state_tok == "*") {
                out.default_branch = succ;
                continue;
            }
            auto state = sys.find_state(agent, state_tok);
            if (!state)
                fail(Err::Parse, "line " + std::to_string(node->line) +
                                     ": unknown state '" + state_tok + "'");
            out.branches[*state] = succ;
        }
        plan.nodes[index.at(id)] = std::move(out);
    }
    plan.root = resolve(root_ref, 0);
    validate_cplan(plan);
    return plan;
}

} // namespace sjp
