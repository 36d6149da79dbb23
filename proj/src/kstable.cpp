#include "sjp/kstable.hpp"

#include <algorithm>
#include <limits>

namespace sjp {

namespace {

StateId detector_state(const Configuration& c, AgentId deviator) {
    return deviator == AgentId::Agent2 ? c.s1 : c.s2;
}

StateId deviator_state(const Configuration& c, AgentId deviator) {
    return deviator == AgentId::Agent2 ? c.s2 : c.s1;
}

ActionId detector_part(const JointAction& ja, AgentId deviator) {
    return deviator == AgentId::Agent2 ? ja.a1 : ja.a2;
}

Configuration step_mixed(const SystemModel& sys, const Configuration& c,
                         ActionId detector_action, ActionId deviator_action,
                         AgentId deviator) {
    if (deviator == AgentId::Agent2)
        return step(sys, c, detector_action, deviator_action);
    return step(sys, c, deviator_action, detector_action);
}

// Honest run of a window from its configuration.
std::vector<Configuration> window_run(const SystemModel& sys,
                                      const Configuration& config,
                                      const Window& window) {
    std::vector<Configuration> run{config};
    for (const JointAction& ja : window)
        run.push_back(step(sys, run.back(), ja.a1, ja.a2));
    return run;
}

struct WindowDeviationSearch {
    const SystemModel& sys;
    const Window& window;
    const std::vector<Configuration>& nominal;
    AgentId deviator;

    // From a configuration that already diverged at step 1 while keeping the
    // detector nominal, can the deviator stay undetected to the window end?
    bool extend_undetected(const Configuration& y, size_t u) {
        if (u == window.size()) return true;
        ActionId det = detector_part(window[u], deviator);
        for (ActionId e : sys.avail(deviator, deviator_state(y, deviator))) {
            Configuration next = step_mixed(sys, y, det, e, deviator);
            if (detector_state(next, deviator) !=
                detector_state(nominal[u + 1], deviator))
                continue; // detected at u+1
            if (extend_undetected(next, u + 1)) return true;
        }
        return false;
    }
};

} // namespace

bool window_deviation_check(const SystemModel& sys, const Configuration& config,
                            const Window& window, AgentId deviator) {
    std::vector<Configuration> nominal = window_run(sys, config, window);
    WindowDeviationSearch search{sys, window, nominal, deviator};
    ActionId det0 = detector_part(window[0], deviator);
    for (ActionId e : sys.avail(deviator, deviator_state(config, deviator))) {
        Configuration y1 = step_mixed(sys, config, det0, e, deviator);
        if (y1 == nominal[1]) continue; // same configuration: not a deviation here
        if (detector_state(y1, deviator) != detector_state(nominal[1], deviator))
            continue; // detected at step 1
        if (search.extend_undetected(y1, 1)) return false;
    }
    return true;
}

namespace {

// Depth-first feasible window enumeration, lexicographic by declared action
// order.
void enumerate_windows(const SystemModel& sys, const Configuration& c, int depth,
                       Window& current, std::vector<Window>& out,
                       long long& budget_left) {
    if (depth == 0) {
        if (--budget_left < 0)
            fail(Err::WindowExplosion, "window enumeration budget exceeded");
        out.push_back(current);
        return;
    }
    for (ActionId a1 : sys.avail(AgentId::Agent1, c.s1))
        for (ActionId a2 : sys.avail(AgentId::Agent2, c.s2)) {
            current.push_back(JointAction{a1, a2});
            enumerate_windows(sys, step(sys, c, a1, a2), depth - 1, current, out,
                              budget_left);
            current.pop_back();
        }
}

bool windows_overlap(const Window& a, const Window& b, int k) {
    for (int i = 0; i < k; ++i)
        if (!(a[i + 1] == b[i])) return false;
    return true;
}

} // namespace

bool WindowGraph::has_edge(int cfg_a, int wa, int cfg_b, int wb) const {
    if (!safe[cfg_a][wa]) return false;
    if (first_target[cfg_a][wa] != cfg_b) return false;
    return windows_overlap(windows[cfg_a][wa], windows[cfg_b][wb], k);
}

WindowGraph build_window_graph(const SystemModel& sys, const Configuration& c0,
                               const GoalSet& goal, int k,
                               const KstableBudget& budget) {
    if (k < 0) fail(Err::OutOfRange, "k must be non-negative");
    const int nc = sys.config_count();
    WindowGraph g;
    g.k = k;
    g.max_time = nc;
    g.max_base_time = std::max(0, nc - 1 - k);

    // Exact-step reachability from c0; also prunes window enumeration.
    g.reachable.assign(g.max_time + 1, std::vector<char>(nc, 0));
    g.reachable[0][sys.config_index(c0)] = 1;
    std::vector<char> ever(nc, 0);
    ever[sys.config_index(c0)] = 1;
    for (int t = 0; t < g.max_time; ++t)
        for (int ci = 0; ci < nc; ++ci) {
            if (!g.reachable[t][ci]) continue;
            Configuration c = sys.config_at(ci);
            for (ActionId a1 : sys.avail(AgentId::Agent1, c.s1))
                for (ActionId a2 : sys.avail(AgentId::Agent2, c.s2)) {
                    int ni = sys.config_index(step(sys, c, a1, a2));
                    g.reachable[t + 1][ni] = 1;
                    ever[ni] = 1;
                }
        }

    const auto gmask = goal_mask(sys, goal);
    g.windows.assign(nc, {});
    g.first_target.assign(nc, {});
    g.safe.assign(nc, {});
    g.base_good.assign(nc, {});
    g.succ.assign(nc, {});

    long long budget_left = budget.max_windows;
    for (int ci = 0; ci < nc; ++ci) {
        if (!ever[ci]) continue;
        Configuration c = sys.config_at(ci);
        Window scratch;
        enumerate_windows(sys, c, k + 1, scratch, g.windows[ci], budget_left);
        const auto& ws = g.windows[ci];
        g.first_target[ci].resize(ws.size());
        g.safe[ci].resize(ws.size());
        g.base_good[ci].resize(ws.size());
        for (size_t w = 0; w < ws.size(); ++w) {
            Configuration next = step(sys, c, ws[w][0].a1, ws[w][0].a2);
            g.first_target[ci][w] = sys.config_index(next);
            bool safe = window_deviation_check(sys, c, ws[w], AgentId::Agent1) &&
                        window_deviation_check(sys, c, ws[w], AgentId::Agent2);
            g.safe[ci][w] = safe ? 1 : 0;
            g.base_good[ci][w] = (safe && gmask[g.first_target[ci][w]]) ? 1 : 0;
        }
    }

    // Overlap successors: edges additionally require the source to be safe.
    for (int ci = 0; ci < nc; ++ci) {
        const auto& ws = g.windows[ci];
        g.succ[ci].resize(ws.size());
        for (size_t w = 0; w < ws.size(); ++w) {
            int ti = g.first_target[ci][w];
            const auto& tws = g.windows[ti];
            for (size_t w2 = 0; w2 < tws.size(); ++w2)
                if (windows_overlap(ws[w], tws[w2], k))
                    g.succ[ci][w].push_back(static_cast<int>(w2));
        }
    }
    return g;
}

SynthResult sjpa(const SystemModel& sys, const Configuration& c0, const GoalSet& goal,
                 int k, const KstableBudget& budget) {
    SynthResult result;
    if (is_goal(goal, c0)) {
        // Goal holds initially; any single available joint action gives an
        // efficient plan that is vacuously k-stable.
        JointOpenPlan plan;
        plan.seq1 = {sys.avail(AgentId::Agent1, c0.s1).front()};
        plan.seq2 = {sys.avail(AgentId::Agent2, c0.s2).front()};
        result.status = SynthStatus::Found;
        result.plan = std::move(plan);
        return result;
    }

    WindowGraph g;
    try {
        g = build_window_graph(sys, c0, goal, k, budget);
    } catch (const SjpError& e) {
        if (e.kind() == Err::WindowExplosion) {
            result.status = SynthStatus::BudgetExceeded;
            return result;
        }
        throw;
    }

    const int nc = sys.config_count();
    constexpr int kInf = std::numeric_limits<int>::max();
    long long total_windows = 0;
    for (int ci = 0; ci < nc; ++ci) total_windows += g.windows[ci].size();
    result.nodes_explored = total_windows * (g.max_base_time + 1);

    // dist[t][config][window]: chain edges left until a base node, kInf when
    // the node is not good at time t.
    std::vector<std::vector<std::vector<int>>> dist(
        g.max_base_time + 1, std::vector<std::vector<int>>(nc));
    for (int t = g.max_base_time; t >= 0; --t) {
        for (int ci = 0; ci < nc; ++ci) {
            const auto& ws = g.windows[ci];
            dist[t][ci].assign(ws.size(), kInf);
            if (!g.reachable[t][ci]) continue;
            for (size_t w = 0; w < ws.size(); ++w) {
                if (g.base_good[ci][w]) {
                    dist[t][ci][w] = 0;
                    continue;
                }
                if (!g.safe[ci][w] || t == g.max_base_time) continue;
                int ti = g.first_target[ci][w];
                int best = kInf;
                for (int w2 : g.succ[ci][w]) {
                    int d = dist[t + 1][ti][w2];
                    if (d != kInf && d + 1 < best) best = d + 1;
                }
                dist[t][ci][w] = best;
            }
        }
    }

    int c0i = sys.config_index(c0);
    int best_w = -1, best_d = kInf;
    for (size_t w = 0; w < g.windows[c0i].size(); ++w)
        if (dist[0][c0i][w] < best_d) {
            best_d = dist[0][c0i][w];
            best_w = static_cast<int>(w);
        }
    if (best_w < 0) {
        result.status = SynthStatus::NotFound;
        return result;
    }

    // Shortest good chain: first joint actions down the chain, then the
    // terminal window whole (goal-reaching action plus the k-step tail).
    JointOpenPlan plan;
    int t = 0, ci = c0i, w = best_w;
    while (dist[t][ci][w] > 0) {
        const Window& win = g.windows[ci][w];
        plan.seq1.push_back(win[0].a1);
        plan.seq2.push_back(win[0].a2);
        int ti = g.first_target[ci][w];
        int next_w = -1;
        for (int w2 : g.succ[ci][w])
            if (dist[t + 1][ti][w2] == dist[t][ci][w] - 1) {
                next_w = w2;
                break;
            }
        ci = ti;
        w = next_w;
        ++t;
    }
    for (const JointAction& ja : g.windows[ci][w]) {
        plan.seq1.push_back(ja.a1);
        plan.seq2.push_back(ja.a2);
    }
    result.status = SynthStatus::Found;
    result.plan = std::move(plan);
    return result;
}

namespace {

struct KstableSearch {
    const SystemModel& sys;
    const std::vector<Configuration>& honest;
    const std::vector<ActionId>& detector_plan;
    AgentId deviator;
    int deadline; // exclusive action range end; detection checked up to here

    std::vector<ActionId> chosen = {};
    std::vector<Configuration> path = {};

    bool undetected(const Configuration& y, int u) {
        if (u == deadline) return true;
        for (ActionId e : sys.avail(deviator, deviator_state(y, deviator))) {
            Configuration next = step_mixed(sys, y, detector_plan[u], e, deviator);
            bool matched = detector_state(next, deviator) ==
                           detector_state(honest[u + 1], deviator);
            if (!matched) continue; // detected at u+1 <= deadline
            chosen.push_back(e);
            path.push_back(next);
            if (undetected(next, u + 1)) return true;
            chosen.pop_back();
            path.pop_back();
        }
        return false;
    }
};

} // namespace

StabilityVerdict verify_kstable(const SystemModel& sys, const Configuration& c0,
                                const GoalSet& goal, const JointOpenPlan& plan,
                                int k) {
    if (k < 0) fail(Err::OutOfRange, "k must be non-negative");
    StabilityVerdict verdict;
    EfficiencyVerdict eff;
    try {
        eff = check_efficient(sys, c0, goal, plan);
    } catch (const SjpError& e) {
        if (e.kind() != Err::UnavailableAction && e.kind() != Err::EmptyPlan &&
            e.kind() != Err::LengthMismatch)
            throw;
        verdict.stable = false;
        verdict.kind = UnstableKind::NotEfficient;
        return verdict;
    }
    if (!eff.efficient()) {
        verdict.stable = false;
        verdict.kind = UnstableKind::NotEfficient;
        return verdict;
    }

    const int t = plan.length();
    const int goal_at = *eff.run.goal_visited;
    for (AgentId deviator : {AgentId::Agent1, AgentId::Agent2}) {
        const auto& detector_plan =
            deviator == AgentId::Agent2 ? plan.seq1 : plan.seq2;
        const auto& deviator_plan =
            deviator == AgentId::Agent2 ? plan.seq2 : plan.seq1;
        // Deviations at or after the honest goal visit cannot prevent it.
        for (int m = 0; m < t && m < goal_at; ++m) {
            int deadline = std::min(m + k + 1, t);
            const Configuration& cm = eff.run.configs[m];
            for (ActionId e : sys.avail(deviator, deviator_state(cm, deviator))) {
                Configuration y1 = step_mixed(sys, cm, detector_plan[m], e, deviator);
                if (y1 == eff.run.configs[m + 1]) continue; // no configuration change
                if (detector_state(y1, deviator) !=
                    detector_state(eff.run.configs[m + 1], deviator))
                    continue; // detected immediately
                KstableSearch search{sys, eff.run.configs, detector_plan, deviator,
                                     deadline};
                search.chosen.push_back(e);
                search.path.push_back(y1);
                if (!search.undetected(y1, m + 1)) continue;

                DeviationCounterexample cex;
                cex.deviator = deviator;
                cex.first_deviation_step = m;
                cex.detection_deadline = deadline;
                cex.run.configs.assign(eff.run.configs.begin(),
                                       eff.run.configs.begin() + m + 1);
                for (int u = 0; u < m; ++u) {
                    cex.run.actions.push_back(plan.at(u));
                    cex.deviator_actions.push_back(deviator_plan[u]);
                }
                for (size_t i = 0; i < search.chosen.size(); ++i) {
                    ActionId dev_a = search.chosen[i];
                    ActionId det_a = detector_plan[m + i];
                    cex.run.actions.push_back(deviator == AgentId::Agent2
                                                  ? JointAction{det_a, dev_a}
                                                  : JointAction{dev_a, det_a});
                    cex.deviator_actions.push_back(dev_a);
                    cex.run.configs.push_back(search.path[i]);
                }
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

} // namespace sjp
