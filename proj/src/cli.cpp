#include "sjp/cli.hpp"

#include "sjp/conditional.hpp"
#include "sjp/crash.hpp"
#include "sjp/exact_synth.hpp"
#include "sjp/generators.hpp"
#include "sjp/kstable.hpp"
#include "sjp/model.hpp"
#include "sjp/stability.hpp"
#include "sjp/textio.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sjp {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitError = 2;
constexpr int kExitBudget = 3;
constexpr int kExitOracle = 4;

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream f(path);
    if (!f) fail(Err::Usage, "cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Collects the report body; the verdict token always comes out first.
struct CmdIO {
    std::ostream& out;
    std::ostream& err;
    CmdIO(std::ostream& o, std::ostream& e) : out(o), err(e) {}

    bool json_mode = false;
    json doc;
    std::ostringstream body;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    int finish(const std::string& token, int code) {
        double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - started)
                        .count();
        out << "verdict: " << token << "\n";
        if (json_mode) {
            doc["format"] = 1;
            doc["verdict"] = token;
            doc["exit"] = code;
            doc["timing_ms"] = ms;
            out << doc.dump(2) << "\n";
        } else {
            out << body.str();
        }
        return code;
    }
};

json config_json(const SystemModel& sys, const Configuration& c) {
    return json::array({sys.state_name(AgentId::Agent1, c.s1),
                        sys.state_name(AgentId::Agent2, c.s2), sys.env_name(c.b)});
}

const char* unstable_reason(UnstableKind kind) {
    switch (kind) {
        case UnstableKind::NotEfficient: return "not-efficient";
        case UnstableKind::UndetectedDeviation: return "undetected-deviation";
        case UnstableKind::None: break;
    }
    return "none";
}

void render_counterexample(const SystemModel& sys, const DeviationCounterexample& cex,
                           CmdIO& io) {
    io.body << "deviator: agent " << agent_number(cex.deviator) << "\n";
    io.body << "first deviation step: " << cex.first_deviation_step << "\n";
    if (cex.detection_deadline)
        io.body << "detection deadline: " << *cex.detection_deadline << "\n";
    if (cex.actual_c0)
        io.body << "actual initial: " << sys.config_name(*cex.actual_c0) << "\n";
    if (cex.witness_c0)
        io.body << "witness initial: " << sys.config_name(*cex.witness_c0) << "\n";
    io.body << "deviator actions:";
    for (ActionId a : cex.deviator_actions)
        io.body << ' ' << sys.action_name(cex.deviator, a);
    io.body << "\nrun:";
    for (const auto& c : cex.run.configs) io.body << ' ' << sys.config_name(c);
    io.body << "\n";

    json j;
    j["deviator"] = agent_number(cex.deviator);
    j["first_deviation_step"] = cex.first_deviation_step;
    if (cex.detection_deadline) j["detection_deadline"] = *cex.detection_deadline;
    if (cex.actual_c0) j["actual_c0"] = config_json(sys, *cex.actual_c0);
    if (cex.witness_c0) j["witness_c0"] = config_json(sys, *cex.witness_c0);
    j["deviator_actions"] = json::array();
    for (ActionId a : cex.deviator_actions)
        j["deviator_actions"].push_back(sys.action_name(cex.deviator, a));
    j["configs"] = json::array();
    for (const auto& c : cex.run.configs) j["configs"].push_back(config_json(sys, c));
    io.doc["counterexample"] = std::move(j);
}

int emit_stability(const SystemModel& sys, const StabilityVerdict& v, CmdIO& io) {
    if (v.stable) return io.finish("STABLE", kExitOk);
    io.doc["reason"] = unstable_reason(v.kind);
    io.body << "reason: " << unstable_reason(v.kind) << "\n";
    if (v.direction) {
        io.doc["direction"] = agent_number(*v.direction);
        io.body << "direction: agent " << agent_number(*v.direction) << "\n";
    }
    if (v.counterexample) render_counterexample(sys, *v.counterexample, io);
    return io.finish("UNSTABLE", kExitNegative);
}

struct CommonArgs {
    std::string system_file;
    std::string plan_file;
    std::string cplan1_file, cplan2_file;
    bool json = false;
    bool oracle = false;
};

ParsedSystem load_system(const CommonArgs& args) {
    return parse_system(read_input(args.system_file));
}

Configuration single_initial(const ParsedSystem& ps) {
    if (ps.initials.empty())
        fail(Err::Usage, "system file declares no 'init' configuration");
    return ps.initials.front();
}

InitialSet initial_set(const ParsedSystem& ps) {
    return make_initial_set(ps.system, ps.initials);
}

// Loads the two conditional plans; open-plan files are lifted when given via
// --plan instead.
std::pair<ConditionalPlan, ConditionalPlan> load_cplans(const CommonArgs& args,
                                                        const SystemModel& sys) {
    if (!args.plan_file.empty()) {
        JointOpenPlan plan = parse_plan(read_input(args.plan_file), sys);
        return {lift_open_plan(plan.seq1), lift_open_plan(plan.seq2)};
    }
    if (args.cplan1_file.empty() || args.cplan2_file.empty())
        fail(Err::Usage, "need --cplan1 and --cplan2 (or --plan for open plans)");
    return {decode_cplan(read_input(args.cplan1_file), sys, AgentId::Agent1),
            decode_cplan(read_input(args.cplan2_file), sys, AgentId::Agent2)};
}

GridPos parse_grid_pos(const std::string& text) {
    auto comma = text.find(',');
    if (comma == std::string::npos)
        fail(Err::Usage, "grid position must look like 'row,col'");
    try {
        return GridPos{std::stoi(text.substr(0, comma)),
                       std::stoi(text.substr(comma + 1))};
    } catch (...) {
        fail(Err::Usage, "bad grid position '" + text + "'");
    }
}

int emit_generated(const Instance& inst, const std::string& out_file, CmdIO& io) {
    std::string text =
        serialize_system(inst.system, {inst.c0}, inst.goal);
    io.doc["states1"] = inst.system.n1();
    io.doc["states2"] = inst.system.n2();
    io.doc["env_states"] = inst.system.nb();
    io.body << "# agent1 states: " << inst.system.n1()
            << ", agent2 states: " << inst.system.n2()
            << ", env states: " << inst.system.nb() << "\n";
    if (!out_file.empty()) {
        std::ofstream f(out_file);
        if (!f) fail(Err::Usage, "cannot write file '" + out_file + "'");
        f << text;
        io.body << "written to " << out_file << "\n";
    } else {
        io.body << text;
    }
    return io.finish("OK", kExitOk);
}

struct DeviationSpec {
    AgentId agent;
    int step;
    std::string action;
};

std::vector<DeviationSpec> parse_deviate(const std::string& spec) {
    std::vector<DeviationSpec> out;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto at = item.find('@');
        auto colon = item.find(':');
        if (at == std::string::npos || colon == std::string::npos || colon < at)
            fail(Err::Usage, "deviation must look like '<agent>@<t>:<action>'");
        DeviationSpec d;
        std::string agent = item.substr(0, at);
        if (agent == "1")
            d.agent = AgentId::Agent1;
        else if (agent == "2")
            d.agent = AgentId::Agent2;
        else
            fail(Err::Usage, "deviating agent must be 1 or 2");
        try {
            d.step = std::stoi(item.substr(at + 1, colon - at - 1));
        } catch (...) {
            fail(Err::Usage, "bad deviation step in '" + item + "'");
        }
        d.action = item.substr(colon + 1);
        out.push_back(d);
    }
    return out;
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
    CLI::App app{"stable joint plan toolkit"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string out_file, cnf_file, deviate_spec, obs_spec;
    int k = 0, max_len = 0, detector = 1, rows = 2, cols = 2;
    long long node_budget = 10'000'000;
    std::uint64_t seed = 1;
    int rs1 = 3, rs2 = 3, rb = 2, ra1 = 2, ra2 = 2, goal_patterns = 1;
    bool with_null = false;
    std::string start1 = "0,0", start2 = "0,0", goal1 = "0,0", goal2 = "0,0";

    auto add_common = [&](CLI::App* cmd, bool with_plan, bool with_cplans) {
        cmd->add_option("--system", common.system_file, "system description file")
            ->required();
        if (with_plan) cmd->add_option("--plan", common.plan_file, "open plan file");
        if (with_cplans) {
            cmd->add_option("--cplan1", common.cplan1_file, "agent-1 conditional plan");
            cmd->add_option("--cplan2", common.cplan2_file, "agent-2 conditional plan");
        }
        cmd->add_flag("--json", common.json, "machine-readable verdict block");
    };

    CLI::App* validate = app.add_subcommand("validate", "check a system file");
    validate->add_option("--system", common.system_file)->required();
    validate->add_flag("--json", common.json);

    CLI::App* verify = app.add_subcommand("verify", "verify stability of an open plan");
    add_common(verify, true, false);
    verify->add_flag("--oracle", common.oracle, "cross-check with the brute-force oracle");

    CLI::App* verify_k = app.add_subcommand("verify-k", "verify k-stability");
    add_common(verify_k, true, false);
    verify_k->add_option("--k", k, "detection window")->required();

    CLI::App* synth_k = app.add_subcommand("synth-k", "synthesize a k-stable plan");
    add_common(synth_k, false, false);
    synth_k->add_option("--k", k, "detection window")->required();

    CLI::App* synth_exact = app.add_subcommand("synth-exact", "exact stable-plan search");
    add_common(synth_exact, false, false);
    synth_exact->add_option("--max-len", max_len, "maximum plan length (default |C|)");
    synth_exact->add_option("--node-budget", node_budget, "enumeration node budget");

    CLI::App* verify_ii =
        app.add_subcommand("verify-ii", "verify stability under initial uncertainty");
    add_common(verify_ii, true, true);

    CLI::App* verify_crash =
        app.add_subcommand("verify-crash", "verify stability against crash failures");
    add_common(verify_crash, true, true);

    CLI::App* gen_3sat = app.add_subcommand("gen-3sat", "reduce a 3-CNF to a system");
    gen_3sat->add_option("--cnf", cnf_file, "DIMACS CNF file")->required();
    gen_3sat->add_option("--out", out_file, "write the system here");
    gen_3sat->add_flag("--json", common.json);

    CLI::App* gen_grid_cmd = app.add_subcommand("gen-grid", "generate a grid system");
    gen_grid_cmd->add_option("--rows", rows)->required();
    gen_grid_cmd->add_option("--cols", cols)->required();
    gen_grid_cmd->add_option("--start1", start1, "agent-1 start 'row,col'")->required();
    gen_grid_cmd->add_option("--start2", start2)->required();
    gen_grid_cmd->add_option("--goal1", goal1)->required();
    gen_grid_cmd->add_option("--goal2", goal2)->required();
    gen_grid_cmd->add_option("--out", out_file);
    gen_grid_cmd->add_flag("--json", common.json);

    CLI::App* gen_random_cmd =
        app.add_subcommand("gen-random", "generate a seeded random system");
    gen_random_cmd->add_option("--seed", seed)->required();
    gen_random_cmd->add_option("--states1", rs1);
    gen_random_cmd->add_option("--states2", rs2);
    gen_random_cmd->add_option("--env-states", rb);
    gen_random_cmd->add_option("--actions1", ra1);
    gen_random_cmd->add_option("--actions2", ra2);
    gen_random_cmd->add_option("--goal-patterns", goal_patterns);
    gen_random_cmd->add_flag("--with-null", with_null, "declare null everywhere");
    gen_random_cmd->add_option("--out", out_file);
    gen_random_cmd->add_flag("--json", common.json);

    CLI::App* simulate = app.add_subcommand("simulate", "run a plan, optionally deviated");
    add_common(simulate, true, false);
    simulate->add_option("--deviate", deviate_spec,
                         "substitutions '<agent>@<t>:<action>,...'");

    CLI::App* monitor_cmd =
        app.add_subcommand("monitor", "replay an observation stream");
    add_common(monitor_cmd, true, true);
    monitor_cmd->add_option("--detector", detector, "observing agent (1 or 2)")
        ->required();
    monitor_cmd->add_option("--obs", obs_spec,
                            "whitespace-separated observed states (default: stdin)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        out << "verdict: ERROR\n";
        err << "error: " << e.what() << "\n";
        return kExitError;
    }

    CmdIO io{out, err};
    io.json_mode = common.json;

    try {
        if (app.got_subcommand(validate)) {
            io.doc["command"] = "validate";
            try {
                ParsedSystem ps = load_system(common);
                io.body << "model ok: " << ps.system.config_count()
                        << " configurations\n";
                return io.finish("VALID", kExitOk);
            } catch (const SjpError& e) {
                if (e.kind() != Err::InvalidModel) throw;
                io.body << e.what() << "\n";
                io.doc["error"] = e.what();
                return io.finish("INVALID", kExitError);
            }
        }

        if (app.got_subcommand(verify)) {
            io.doc["command"] = "verify";
            ParsedSystem ps = load_system(common);
            JointOpenPlan plan = parse_plan(read_input(common.plan_file), ps.system);
            Configuration c0 = single_initial(ps);
            StabilityVerdict v = verify_stable(ps.system, c0, ps.goal, plan);
            if (common.oracle) {
                bool oracle_stable = true;
                std::optional<DeviationCounterexample> oracle_cex;
                EfficiencyVerdict eff = check_efficient(ps.system, c0, ps.goal, plan);
                if (!eff.efficient()) {
                    oracle_stable = false; // matches the NotEfficient verdict
                } else {
                    for (AgentId dev : {AgentId::Agent1, AgentId::Agent2}) {
                        StabilityVerdict b =
                            brute_force_verify(ps.system, c0, ps.goal, plan, dev);
                        if (!b.stable) {
                            oracle_stable = false;
                            oracle_cex = b.counterexample;
                            break;
                        }
                    }
                }
                if (oracle_stable != v.stable) {
                    io.body << "verifier says " << (v.stable ? "STABLE" : "UNSTABLE")
                            << ", oracle says "
                            << (oracle_stable ? "STABLE" : "UNSTABLE") << "\n";
                    if (v.counterexample)
                        render_counterexample(ps.system, *v.counterexample, io);
                    if (oracle_cex) render_counterexample(ps.system, *oracle_cex, io);
                    return io.finish("ORACLE_DISAGREEMENT", kExitOracle);
                }
                io.doc["oracle"] = "agreed";
                io.body << "oracle: agreed\n";
            }
            return emit_stability(ps.system, v, io);
        }

        if (app.got_subcommand(verify_k)) {
            io.doc["command"] = "verify-k";
            io.doc["k"] = k;
            ParsedSystem ps = load_system(common);
            JointOpenPlan plan = parse_plan(read_input(common.plan_file), ps.system);
            StabilityVerdict v =
                verify_kstable(ps.system, single_initial(ps), ps.goal, plan, k);
            return emit_stability(ps.system, v, io);
        }

        if (app.got_subcommand(synth_k)) {
            io.doc["command"] = "synth-k";
            io.doc["k"] = k;
            ParsedSystem ps = load_system(common);
            SynthResult r = sjpa(ps.system, single_initial(ps), ps.goal, k);
            if (r.status == SynthStatus::BudgetExceeded)
                return io.finish("BUDGET_EXCEEDED", kExitBudget);
            if (!r.found()) return io.finish("NOT_FOUND", kExitNegative);
            std::string plan_text = serialize_plan(*r.plan, ps.system);
            io.body << plan_text;
            io.doc["plan"] = plan_text;
            return io.finish("FOUND", kExitOk);
        }

        if (app.got_subcommand(synth_exact)) {
            io.doc["command"] = "synth-exact";
            ParsedSystem ps = load_system(common);
            SynthBudget budget;
            budget.max_len = max_len;
            budget.node_budget = node_budget;
            SynthResult r = sjpp_solve(ps.system, single_initial(ps), ps.goal, budget);
            io.doc["nodes_explored"] = r.nodes_explored;
            if (r.status == SynthStatus::BudgetExceeded) {
                io.body << "explored " << r.nodes_explored << " nodes\n";
                return io.finish("BUDGET_EXCEEDED", kExitBudget);
            }
            if (r.status == SynthStatus::NotFound)
                return io.finish("NOT_FOUND", kExitNegative);
            std::string plan_text = serialize_plan(*r.plan, ps.system);
            io.body << plan_text;
            io.doc["plan"] = plan_text;
            return io.finish("FOUND", kExitOk);
        }

        if (app.got_subcommand(verify_ii) || app.got_subcommand(verify_crash)) {
            bool crash = app.got_subcommand(verify_crash);
            io.doc["command"] = crash ? "verify-crash" : "verify-ii";
            ParsedSystem ps = load_system(common);
            auto [p1, p2] = load_cplans(common, ps.system);
            InitialSet c0s = initial_set(ps);
            IIEfficiencyVerdict eff =
                verify_ii_efficiency(ps.system, c0s, ps.goal, p1, p2);
            if (!eff.efficient) {
                io.doc["reason"] = "not-efficient";
                io.body << "reason: not-efficient ("
                        << efficiency_status_name(eff.status) << " from "
                        << ps.system.config_name(*eff.failing_c0) << ")\n";
                return io.finish("UNSTABLE", kExitNegative);
            }
            if (crash) {
                StabilityVerdict v =
                    verify_crash_stability(ps.system, c0s, ps.goal, p1, p2);
                return emit_stability(ps.system, v, io);
            }
            for (AgentId dev : {AgentId::Agent1, AgentId::Agent2}) {
                StabilityVerdict v =
                    verify_ii_stability(ps.system, c0s, ps.goal, p1, p2, dev);
                if (!v.stable) return emit_stability(ps.system, v, io);
            }
            return io.finish("STABLE", kExitOk);
        }

        if (app.got_subcommand(gen_3sat)) {
            io.doc["command"] = "gen-3sat";
            Cnf cnf = parse_dimacs(read_input(cnf_file));
            return emit_generated(reduce_3sat(cnf), out_file, io);
        }

        if (app.got_subcommand(gen_grid_cmd)) {
            io.doc["command"] = "gen-grid";
            Instance inst =
                gen_grid(rows, cols, parse_grid_pos(start1), parse_grid_pos(start2),
                         parse_grid_pos(goal1), parse_grid_pos(goal2));
            return emit_generated(inst, out_file, io);
        }

        if (app.got_subcommand(gen_random_cmd)) {
            io.doc["command"] = "gen-random";
            RandomSpec spec;
            spec.states1 = rs1;
            spec.states2 = rs2;
            spec.env_states = rb;
            spec.actions1 = ra1;
            spec.actions2 = ra2;
            spec.goal_patterns = goal_patterns;
            spec.include_null = with_null;
            return emit_generated(gen_random(seed, spec), out_file, io);
        }

        if (app.got_subcommand(simulate)) {
            io.doc["command"] = "simulate";
            ParsedSystem ps = load_system(common);
            JointOpenPlan plan = parse_plan(read_input(common.plan_file), ps.system);
            Configuration c0 = single_initial(ps);
            Trajectory honest = execute_open(ps.system, c0, plan, &ps.goal);
            JointOpenPlan deviated = plan;
            for (const DeviationSpec& d : parse_deviate(deviate_spec)) {
                if (d.step < 0 || d.step >= plan.length())
                    fail(Err::Usage, "deviation step out of range");
                auto a = ps.system.find_action(d.agent, d.action);
                if (!a) fail(Err::Usage, "unknown action '" + d.action + "'");
                (d.agent == AgentId::Agent1 ? deviated.seq1 : deviated.seq2)[d.step] =
                    *a;
            }
            Trajectory run = execute_open(ps.system, c0, deviated, &ps.goal);
            io.doc["configs"] = json::array();
            for (size_t i = 0; i < run.configs.size(); ++i) {
                io.body << i << ": " << ps.system.config_name(run.configs[i]) << "\n";
                io.doc["configs"].push_back(config_json(ps.system, run.configs[i]));
            }
            for (AgentId agent : {AgentId::Agent1, AgentId::Agent2}) {
                std::optional<int> noticed;
                for (size_t i = 0; i < run.configs.size(); ++i) {
                    StateId actual = agent == AgentId::Agent1 ? run.configs[i].s1
                                                              : run.configs[i].s2;
                    StateId nominal = agent == AgentId::Agent1 ? honest.configs[i].s1
                                                               : honest.configs[i].s2;
                    if (actual != nominal) {
                        noticed = static_cast<int>(i);
                        break;
                    }
                }
                if (noticed) {
                    io.body << "agent " << agent_number(agent)
                            << " state diverges from nominal at step " << *noticed
                            << "\n";
                    io.doc[agent == AgentId::Agent1 ? "divergence1" : "divergence2"] =
                        *noticed;
                }
            }
            if (run.goal_visited) {
                io.body << "goal visited at step " << *run.goal_visited << "\n";
                io.doc["goal_visited"] = *run.goal_visited;
                return io.finish("GOAL_REACHED", kExitOk);
            }
            return io.finish("GOAL_MISSED", kExitNegative);
        }

        if (app.got_subcommand(monitor_cmd)) {
            io.doc["command"] = "monitor";
            ParsedSystem ps = load_system(common);
            auto [p1, p2] = load_cplans(common, ps.system);
            if (detector != 1 && detector != 2)
                fail(Err::Usage, "detector must be 1 or 2");
            AgentId det = detector == 1 ? AgentId::Agent1 : AgentId::Agent2;
            DetectionMonitor mon(ps.system, initial_set(ps), p1, p2, det);
            std::string stream = obs_spec;
            if (stream.empty()) {
                std::ostringstream ss;
                ss << std::cin.rdbuf();
                stream = ss.str();
            }
            std::istringstream obs_in(stream);
            std::string tok;
            std::optional<int> fired;
            int fed = 0;
            while (obs_in >> tok) {
                auto s = ps.system.find_state(det, tok);
                if (!s) fail(Err::ObservationOutOfRange, "unknown state '" + tok + "'");
                auto r = mon.feed(*s);
                ++fed;
                if (r && !fired) fired = r;
            }
            io.doc["observations"] = fed;
            if (fired) {
                io.body << "detected at step " << *fired << "\n";
                io.doc["detected_at"] = *fired;
                return io.finish("DETECTED", kExitOk);
            }
            io.body << "stream consistent with " << mon.candidates_left()
                    << " initial configuration(s)\n";
            return io.finish("NO_DETECTION", kExitNegative);
        }
    } catch (const SjpError& e) {
        if (e.kind() == Err::BudgetExceeded || e.kind() == Err::WindowExplosion) {
            err << "error: " << e.what() << "\n";
            return io.finish("BUDGET_EXCEEDED", kExitBudget);
        }
        err << "error: " << e.what() << "\n";
        io.doc["error"] = e.what();
        return io.finish("ERROR", kExitError);
    }

    err << "error: no subcommand handled\n";
    return kExitError;
}

} // namespace sjp
