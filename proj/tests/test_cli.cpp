#include "sjp/cli.hpp"

#include "sjp/textio.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace sjp;
using namespace sjp::test;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;

    std::string first_line() const {
        auto nl = out.find('\n');
        return nl == std::string::npos ? out : out.substr(0, nl);
    }
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = cli_main(args, out, err);
    return CliResult{code, out.str(), err.str()};
}

// Temp files for driving the CLI; removed on destruction.
struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content) {
        path = std::string("cli_test_") + name;
        std::ofstream f(path);
        f << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

std::string fixture_path(const std::string& name) {
    return std::string(SJP_FIXTURE_DIR) + "/" + name;
}

} // namespace

TEST_CASE("verify on the undetectable wrong turn: UNSTABLE, exit 1") {
    CliResult r = run_cli({"verify", "--system", fixture_path("sys_a.sjp"), "--plan",
                           fixture_path("plan_a.splan")});
    CHECK(r.code == 1);
    CHECK(r.first_line() == "verdict: UNSTABLE");
}

TEST_CASE("verify on the detectable variant: STABLE, exit 0, oracle agrees") {
    CliResult r = run_cli({"verify", "--system", fixture_path("sys_b.sjp"), "--plan",
                           fixture_path("plan_a.splan"), "--oracle"});
    CHECK(r.code == 0);
    CHECK(r.first_line() == "verdict: STABLE");
}

TEST_CASE("json output carries the verdict and counterexample") {
    CliResult r = run_cli({"verify", "--system", fixture_path("sys_a.sjp"), "--plan",
                           fixture_path("plan_a.splan"), "--json"});
    CHECK(r.code == 1);
    CHECK(r.first_line() == "verdict: UNSTABLE");
    CHECK(r.out.find("\"format\": 1") != std::string::npos);
    CHECK(r.out.find("\"counterexample\"") != std::string::npos);
    CHECK(r.out.find("\"timing_ms\"") != std::string::npos);
}

TEST_CASE("validate verdicts") {
    CliResult ok = run_cli({"validate", "--system", fixture_path("sys_a.sjp")});
    CHECK(ok.code == 0);
    CHECK(ok.first_line() == "verdict: VALID");

    TempFile broken("broken.sjp",
                    "agent1 states: u0\nagent2 states: v0\nenv states: e\n"
                    "agent1 actions: a\nagent2 actions: b\n"
                    "avail1 u0: a\navail2 v0: b\n");
    CliResult bad = run_cli({"validate", "--system", broken.path});
    CHECK(bad.code == 2);
    CHECK(bad.first_line() == "verdict: INVALID");
}

TEST_CASE("usage errors exit 2 with an ERROR verdict") {
    CliResult r = run_cli({"verify", "--plan", "nope.splan"});
    CHECK(r.code == 2);
    CHECK(r.first_line() == "verdict: ERROR");
}

TEST_CASE("verify-k and synth-k on the delayed-detection fixture") {
    Fixture d = sys_d();
    TempFile sys_file("sys_d.sjp", serialize_system(d.sys, {d.c0}, d.goal));
    TempFile plan_file("plan_d.splan", serialize_plan(d.plan, d.sys));

    CliResult v0 = run_cli({"verify-k", "--k", "0", "--system", sys_file.path,
                            "--plan", plan_file.path});
    CHECK(v0.code == 1);
    CHECK(v0.first_line() == "verdict: UNSTABLE");

    CliResult v1 = run_cli({"verify-k", "--k", "1", "--system", sys_file.path,
                            "--plan", plan_file.path});
    CHECK(v1.code == 0);
    CHECK(v1.first_line() == "verdict: STABLE");

    CliResult s0 = run_cli({"synth-k", "--k", "0", "--system", sys_file.path});
    CHECK(s0.code == 1);
    CHECK(s0.first_line() == "verdict: NOT_FOUND");

    CliResult s1 = run_cli({"synth-k", "--k", "1", "--system", sys_file.path});
    CHECK(s1.code == 0);
    CHECK(s1.first_line() == "verdict: FOUND");
    CHECK(s1.out.find("agent1:") != std::string::npos);
}

TEST_CASE("gen-3sat output pipes back into synth-exact") {
    TempFile unsat("unsat.dimacs", "p cnf 1 2\n1 0\n-1 0\n");
    CliResult gen = run_cli({"gen-3sat", "--cnf", unsat.path});
    CHECK(gen.code == 0);
    CHECK(gen.first_line() == "verdict: OK");

    // The generator's stdout (verdict line included) is a valid system file.
    TempFile piped("piped.sjp", gen.out);
    CliResult synth = run_cli({"synth-exact", "--system", piped.path});
    CHECK(synth.code == 1);
    CHECK(synth.first_line() == "verdict: NOT_FOUND");

    TempFile sat("sat.dimacs", "p cnf 1 1\n1 0\n");
    CliResult gen2 = run_cli({"gen-3sat", "--cnf", sat.path});
    TempFile piped2("piped2.sjp", gen2.out);
    CliResult synth2 = run_cli({"synth-exact", "--system", piped2.path});
    CHECK(synth2.code == 0);
    CHECK(synth2.first_line() == "verdict: FOUND");
}

TEST_CASE("gen-3sat round-trips through the parser") {
    TempFile cnf("roundtrip.dimacs", "p cnf 2 2\n1 -2 0\n-1 2 0\n");
    TempFile out_file("gen.sjp", "");
    CliResult gen =
        run_cli({"gen-3sat", "--cnf", cnf.path, "--out", out_file.path});
    CHECK(gen.code == 0);
    std::ifstream f(out_file.path);
    std::ostringstream ss;
    ss << f.rdbuf();
    ParsedSystem ps = parse_system(ss.str());
    CHECK(serialize_system(ps.system, ps.initials, ps.goal) == ss.str());
}

TEST_CASE("gen-random is reproducible via the CLI") {
    TempFile out1("rand1.sjp", "");
    TempFile out2("rand2.sjp", "");
    run_cli({"gen-random", "--seed", "9", "--out", out1.path});
    run_cli({"gen-random", "--seed", "9", "--out", out2.path});
    std::ifstream f1(out1.path), f2(out2.path);
    std::ostringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
    CHECK_FALSE(s1.str().empty());
}

TEST_CASE("simulate reports deviated runs") {
    CliResult honest = run_cli({"simulate", "--system", fixture_path("sys_a.sjp"),
                                "--plan", fixture_path("plan_a.splan")});
    CHECK(honest.code == 0);
    CHECK(honest.first_line() == "verdict: GOAL_REACHED");

    CliResult deviated =
        run_cli({"simulate", "--system", fixture_path("sys_a.sjp"), "--plan",
                 fixture_path("plan_a.splan"), "--deviate", "2@0:bad"});
    CHECK(deviated.code == 1);
    CHECK(deviated.first_line() == "verdict: GOAL_MISSED");
}

TEST_CASE("monitor detects the diverting run and passes the honest one") {
    CliResult clean = run_cli({"monitor", "--system", fixture_path("sys_b.sjp"),
                               "--plan", fixture_path("plan_a.splan"), "--detector",
                               "1", "--obs", "u0 u1"});
    CHECK(clean.code == 1);
    CHECK(clean.first_line() == "verdict: NO_DETECTION");

    CliResult fired = run_cli({"monitor", "--system", fixture_path("sys_b.sjp"),
                               "--plan", fixture_path("plan_a.splan"), "--detector",
                               "1", "--obs", "u0 u2"});
    CHECK(fired.code == 0);
    CHECK(fired.first_line() == "verdict: DETECTED");
    CHECK(fired.out.find("detected at step 1") != std::string::npos);
}

TEST_CASE("verify-ii and verify-crash run from files") {
    Fixture b = sys_b();
    TempFile sys_file("sys_b_ii.sjp", serialize_system(b.sys, {b.c0}, b.goal));
    TempFile plan_file("plan_ii.splan", serialize_plan(b.plan, b.sys));
    CliResult ii = run_cli({"verify-ii", "--system", sys_file.path, "--plan",
                            plan_file.path});
    CHECK(ii.code == 0);
    CHECK(ii.first_line() == "verdict: STABLE");

    // sys_b lacks null transitions, so crash analysis is a model error.
    CliResult crash = run_cli({"verify-crash", "--system", sys_file.path, "--plan",
                               plan_file.path});
    CHECK(crash.code == 2);
    CHECK(crash.first_line() == "verdict: ERROR");
}

TEST_CASE("budget exhaustion exits 3") {
    Fixture a = sys_a();
    TempFile sys_file("sys_a_budget.sjp", serialize_system(a.sys, {a.c0}, a.goal));
    CliResult r = run_cli({"synth-exact", "--system", sys_file.path,
                           "--node-budget", "2"});
    CHECK(r.code == 3);
    CHECK(r.first_line() == "verdict: BUDGET_EXCEEDED");
}
