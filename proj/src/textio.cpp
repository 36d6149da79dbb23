#include "sjp/textio.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace sjp {

namespace {

bool valid_ident(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

std::string strip(std::string s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

[[noreturn]] void diag(int line, const std::string& msg) {
    fail(Err::Parse, "line " + std::to_string(line) + ": " + msg);
}

} // namespace

ParsedSystem parse_system(std::string_view text) {
    ParsedSystem ps;
    SystemModel& sys = ps.system;

    struct PendingGoal {
        std::string s1, s2, b;
        int line;
    };
    std::vector<PendingGoal> goals;
    std::vector<std::pair<std::vector<std::string>, int>> inits;
    std::map<long long, int> first_row_line; // duplicate detection

    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto pos = raw.find('#'); pos != std::string::npos) raw.resize(pos);
        std::string line = strip(raw);
        if (line.empty()) continue;
        // Generator output leads with a verdict line; tolerate it so gen-*
        // subcommands pipe straight into consumers.
        if (line.rfind("verdict:", 0) == 0) continue;

        auto colon = line.find(':');
        auto head = split_ws(colon == std::string::npos ? line : line.substr(0, colon));
        std::string tail = colon == std::string::npos ? "" : line.substr(colon + 1);

        auto declare = [&](auto add, const std::string& what) {
            for (const std::string& id : split_ws(tail)) {
                if (!valid_ident(id)) diag(lineno, "bad " + what + " id '" + id + "'");
                try {
                    (sys.*add)(id);
                } catch (const SjpError& e) {
                    diag(lineno, e.what());
                }
            }
        };

        if (head.size() == 2 && head[0] == "agent1" && head[1] == "states") {
            declare(&SystemModel::add_state1, "state");
        } else if (head.size() == 2 && head[0] == "agent2" && head[1] == "states") {
            declare(&SystemModel::add_state2, "state");
        } else if (head.size() == 2 && head[0] == "env" && head[1] == "states") {
            declare(&SystemModel::add_env_state, "state");
        } else if (head.size() == 2 && head[0] == "agent1" && head[1] == "actions") {
            declare(&SystemModel::add_action1, "action");
        } else if (head.size() == 2 && head[0] == "agent2" && head[1] == "actions") {
            declare(&SystemModel::add_action2, "action");
        } else if (head.size() == 2 && (head[0] == "avail1" || head[0] == "avail2")) {
            AgentId agent = head[0] == "avail1" ? AgentId::Agent1 : AgentId::Agent2;
            auto s = sys.find_state(agent, head[1]);
            if (!s) diag(lineno, "unknown state '" + head[1] + "'");
            auto actions = split_ws(tail);
            if (actions.empty()) diag(lineno, "empty availability list");
            for (const std::string& name : actions) {
                auto a = sys.find_action(agent, name);
                if (!a) diag(lineno, "unknown action '" + name + "'");
                sys.add_avail(agent, *s, *a);
            }
        } else if (head[0] == "trans") {
            auto toks = split_ws(line);
            if (toks.size() != 10 || toks[6] != "->")
                diag(lineno, "expected 'trans s1 s2 b a1 a2 -> s1 s2 b'");
            auto s1 = sys.find_state(AgentId::Agent1, toks[1]);
            auto s2 = sys.find_state(AgentId::Agent2, toks[2]);
            auto b = sys.find_env_state(toks[3]);
            auto a1 = sys.find_action(AgentId::Agent1, toks[4]);
            auto a2 = sys.find_action(AgentId::Agent2, toks[5]);
            auto t1 = sys.find_state(AgentId::Agent1, toks[7]);
            auto t2 = sys.find_state(AgentId::Agent2, toks[8]);
            auto tb = sys.find_env_state(toks[9]);
            if (!s1 || !t1) diag(lineno, "unknown agent-1 state");
            if (!s2 || !t2) diag(lineno, "unknown agent-2 state");
            if (!b || !tb) diag(lineno, "unknown environment state");
            if (!a1) diag(lineno, "unknown agent-1 action '" + toks[4] + "'");
            if (!a2) diag(lineno, "unknown agent-2 action '" + toks[5] + "'");
            Configuration key{*s1, *s2, *b};
            Configuration image{*t1, *t2, *tb};
            long long packed =
                (static_cast<long long>(sys.config_index(key)) * sys.na1() + *a1) *
                    sys.na2() + *a2;
            auto [it, inserted] = first_row_line.emplace(packed, lineno);
            if (!inserted) {
                const TransitionRow* prev = nullptr;
                for (const auto& r : sys.rows)
                    if (r.line == it->second) prev = &r;
                if (prev && !(prev->image == image))
                    diag(lineno, "conflicts with transition at line " +
                                     std::to_string(it->second));
                continue; // benign duplicate
            }
            sys.add_row(*s1, *s2, *b, *a1, *a2, image, lineno);
        } else if (head[0] == "init") {
            auto toks = split_ws(line);
            if (toks.size() != 4) diag(lineno, "expected 'init s1 s2 b'");
            inits.push_back({{toks[1], toks[2], toks[3]}, lineno});
        } else if (head[0] == "goal") {
            auto toks = split_ws(line);
            if (toks.size() != 4) diag(lineno, "expected 'goal s1 s2 b'");
            goals.push_back({toks[1], toks[2], toks[3], lineno});
        } else {
            diag(lineno, "unrecognized declaration '" + head[0] + "'");
        }
    }

    for (const auto& [toks, line] : inits) {
        auto s1 = sys.find_state(AgentId::Agent1, toks[0]);
        auto s2 = sys.find_state(AgentId::Agent2, toks[1]);
        auto b = sys.find_env_state(toks[2]);
        if (!s1 || !s2 || !b) diag(line, "init references an unknown state");
        ps.initials.push_back({*s1, *s2, *b});
    }
    for (const auto& g : goals) {
        GoalPattern pat;
        if (g.s1 != "*") {
            auto s = sys.find_state(AgentId::Agent1, g.s1);
            if (!s) diag(g.line, "goal references unknown agent-1 state '" + g.s1 + "'");
            pat.s1 = *s;
        }
        if (g.s2 != "*") {
            auto s = sys.find_state(AgentId::Agent2, g.s2);
            if (!s) diag(g.line, "goal references unknown agent-2 state '" + g.s2 + "'");
            pat.s2 = *s;
        }
        if (g.b != "*") {
            auto s = sys.find_env_state(g.b);
            if (!s) diag(g.line, "goal references unknown environment state '" + g.b + "'");
            pat.b = *s;
        }
        ps.goal.patterns.push_back(pat);
    }

    sys.finalize();
    auto defects = validate_system(sys);
    if (!defects.empty()) {
        std::string msg = "model validation failed:";
        for (const auto& d : defects) msg += "\n  " + defect_to_string(d);
        fail(Err::InvalidModel, msg);
    }
    return ps;
}

std::string serialize_system(const SystemModel& sys,
                             const std::vector<Configuration>& initials,
                             const GoalSet& goal) {
    std::ostringstream out;
    auto list = [&](const char* label, const std::vector<std::string>& names) {
        out << label << ":";
        for (const auto& n : names) out << ' ' << n;
        out << '\n';
    };
    list("agent1 states", sys.states1);
    list("agent2 states", sys.states2);
    list("env states", sys.env_states);
    list("agent1 actions", sys.actions1);
    list("agent2 actions", sys.actions2);
    for (int s = 0; s < sys.n1(); ++s) {
        out << "avail1 " << sys.states1[s] << ":";
        for (ActionId a : sys.avail1[s]) out << ' ' << sys.actions1[a];
        out << '\n';
    }
    for (int s = 0; s < sys.n2(); ++s) {
        out << "avail2 " << sys.states2[s] << ":";
        for (ActionId a : sys.avail2[s]) out << ' ' << sys.actions2[a];
        out << '\n';
    }
    // Canonical row order: the compiled transition function, key-sorted.
    for (int ci = 0; ci < sys.config_count(); ++ci) {
        Configuration c = sys.config_at(ci);
        for (ActionId a1 : sys.avail1[c.s1])
            for (ActionId a2 : sys.avail2[c.s2]) {
                int img = sys.lookup(c, a1, a2);
                if (img < 0) continue;
                Configuration t = sys.config_at(img);
                out << "trans " << sys.states1[c.s1] << ' ' << sys.states2[c.s2] << ' '
                    << sys.env_states[c.b] << ' ' << sys.actions1[a1] << ' '
                    << sys.actions2[a2] << " -> " << sys.states1[t.s1] << ' '
                    << sys.states2[t.s2] << ' ' << sys.env_states[t.b] << '\n';
            }
    }
    for (const auto& c : initials)
        out << "init " << sys.states1[c.s1] << ' ' << sys.states2[c.s2] << ' '
            << sys.env_states[c.b] << '\n';
    for (const auto& p : goal.patterns) {
        out << "goal " << (p.s1 ? sys.states1[*p.s1] : std::string("*")) << ' '
            << (p.s2 ? sys.states2[*p.s2] : std::string("*")) << ' '
            << (p.b ? sys.env_states[*p.b] : std::string("*")) << '\n';
    }
    return out.str();
}

JointOpenPlan parse_plan(std::string_view text, const SystemModel& sys) {
    JointOpenPlan plan;
    bool have1 = false, have2 = false;
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto pos = raw.find('#'); pos != std::string::npos) raw.resize(pos);
        std::string line = strip(raw);
        if (line.empty()) continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) diag(lineno, "expected 'agent1:' or 'agent2:'");
        std::string label = strip(line.substr(0, colon));
        AgentId agent;
        if (label == "agent1")
            agent = AgentId::Agent1;
        else if (label == "agent2")
            agent = AgentId::Agent2;
        else
            diag(lineno, "unknown plan label '" + label + "'");
        auto& seq = agent == AgentId::Agent1 ? plan.seq1 : plan.seq2;
        auto& have = agent == AgentId::Agent1 ? have1 : have2;
        if (have) diag(lineno, "duplicate '" + label + "' line");
        have = true;
        for (const std::string& name : split_ws(line.substr(colon + 1))) {
            auto a = sys.find_action(agent, name);
            if (!a) diag(lineno, "unknown action '" + name + "'");
            seq.push_back(*a);
        }
    }
    if (!have1 || !have2) fail(Err::Parse, "plan needs both agent1: and agent2: lines");
    if (plan.seq1.size() != plan.seq2.size())
        fail(Err::LengthMismatch,
             "plan lengths differ: agent1 has " + std::to_string(plan.seq1.size()) +
                 ", agent2 has " + std::to_string(plan.seq2.size()));
    return plan;
}

std::string serialize_plan(const JointOpenPlan& plan, const SystemModel& sys) {
    std::ostringstream out;
    out << "agent1:";
    for (ActionId a : plan.seq1) out << ' ' << sys.actions1.at(a);
    out << "\nagent2:";
    for (ActionId a : plan.seq2) out << ' ' << sys.actions2.at(a);
    out << '\n';
    return out.str();
}

Cnf parse_dimacs(std::string_view text) {
    Cnf cnf;
    int expected_clauses = -1;
    std::vector<int> current;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip(line);
        if (line.empty() || line[0] == 'c') continue;
        if (line[0] == 'p') {
            auto toks = split_ws(line);
            if (toks.size() != 4 || toks[1] != "cnf")
                diag(lineno, "expected 'p cnf <vars> <clauses>'");
            try {
                cnf.num_vars = std::stoi(toks[2]);
                expected_clauses = std::stoi(toks[3]);
            } catch (...) {
                diag(lineno, "bad numbers in header");
            }
            continue;
        }
        if (expected_clauses < 0) diag(lineno, "clause before 'p cnf' header");
        std::istringstream ls(line);
        int lit;
        while (ls >> lit) {
            if (lit == 0) {
                if (current.empty()) diag(lineno, "empty clause");
                if (current.size() > 3)
                    diag(lineno, "clause has more than three literals");
                while (current.size() < 3) current.push_back(current.front());
                cnf.clauses.push_back({current[0], current[1], current[2]});
                current.clear();
            } else {
                if (std::abs(lit) > cnf.num_vars)
                    diag(lineno, "literal " + std::to_string(lit) + " out of range");
                current.push_back(lit);
            }
        }
        if (!ls.eof()) diag(lineno, "bad literal token");
    }
    if (!current.empty()) fail(Err::Parse, "last clause not terminated by 0");
    validate_cnf(cnf);
    return cnf;
}

std::string serialize_dimacs(const Cnf& cnf) {
    std::ostringstream out;
    out << "p cnf " << cnf.num_vars << ' ' << cnf.clauses.size() << '\n';
    for (const auto& cl : cnf.clauses)
        out << cl[0] << ' ' << cl[1] << ' ' << cl[2] << " 0\n";
    return out.str();
}

} // namespace sjp
