#include "sjp/textio.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace sjp;
using namespace sjp::test;

namespace {

std::string read_fixture(const std::string& name) {
    std::ifstream f(std::string(SJP_FIXTURE_DIR) + "/" + name);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("fixture files parse and match the built-in models") {
    struct Case {
        const char* file;
        Fixture fixture;
    };
    Case cases[] = {{"sys_a.sjp", sys_a()},
                    {"sys_b.sjp", sys_b()},
                    {"sys_c.sjp", sys_c()},
                    {"sys_d.sjp", sys_d()}};
    for (auto& c : cases) {
        ParsedSystem ps = parse_system(read_fixture(c.file));
        CHECK(ps.system.same_model(c.fixture.sys));
        REQUIRE(ps.initials.size() == 1);
        CHECK(ps.initials[0] == c.fixture.c0);
        CHECK(goal_mask(ps.system, ps.goal) ==
              goal_mask(c.fixture.sys, c.fixture.goal));
    }
}

TEST_CASE("system round-trip through serialize and parse") {
    Fixture f = sys_d();
    std::string text = serialize_system(f.sys, {f.c0}, f.goal);
    ParsedSystem ps = parse_system(text);
    CHECK(ps.system.same_model(f.sys));
    CHECK(serialize_system(ps.system, ps.initials, ps.goal) == text);
}

TEST_CASE("parser reports conflicting duplicate transitions with both lines") {
    Fixture f = sys_a();
    std::string text = serialize_system(f.sys, {f.c0}, f.goal);
    // Append a conflicting copy of the first trans line.
    std::istringstream in(text);
    std::string line, first_trans;
    while (std::getline(in, line))
        if (line.rfind("trans", 0) == 0) {
            first_trans = line;
            break;
        }
    REQUIRE_FALSE(first_trans.empty());
    // Change the image's agent-1 state to force a conflict.
    auto arrow = first_trans.find("->");
    std::string prefix = first_trans.substr(0, arrow + 3);
    std::string image = first_trans.substr(arrow + 3);
    std::istringstream img(image);
    std::string i1, i2, i3;
    img >> i1 >> i2 >> i3;
    std::string flipped = prefix + (i1 == "u0" ? "u1" : "u0") + " " + i2 + " " + i3;
    try {
        parse_system(text + flipped + "\n");
        FAIL("expected a parse error");
    } catch (const SjpError& e) {
        CHECK(e.kind() == Err::Parse);
        CHECK(std::string(e.what()).find("conflicts with transition at line") !=
              std::string::npos);
    }
}

TEST_CASE("parse diagnostics carry line numbers") {
    try {
        parse_system("agent1 states: u0\nbogus line here\n");
        FAIL("expected a parse error");
    } catch (const SjpError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("parser skips comments, blanks and verdict lines") {
    Fixture f = sys_c();
    std::string text = "verdict: OK\n# generated\n\n" +
                       serialize_system(f.sys, {f.c0}, f.goal);
    CHECK(parse_system(text).system.same_model(f.sys));
}

TEST_CASE("validation failures abort parsing") {
    std::string text =
        "agent1 states: u0\nagent2 states: v0\nenv states: e\n"
        "agent1 actions: a\nagent2 actions: b\n"
        "avail1 u0: a\navail2 v0: b\n"; // transition table missing
    CHECK_THROWS_AS(parse_system(text), SjpError);
    try {
        parse_system(text);
    } catch (const SjpError& e) {
        CHECK(e.kind() == Err::InvalidModel);
        CHECK(std::string(e.what()).find("missing transition") != std::string::npos);
    }
}

TEST_CASE("plan round-trip and length mismatch") {
    Fixture f = sys_a();
    std::string text = serialize_plan(f.plan, f.sys);
    JointOpenPlan parsed = parse_plan(text, f.sys);
    CHECK(parsed.seq1 == f.plan.seq1);
    CHECK(parsed.seq2 == f.plan.seq2);

    CHECK_THROWS_AS(parse_plan("agent1: go go\nagent2: good\n", f.sys), SjpError);
    try {
        parse_plan("agent1: go go\nagent2: good\n", f.sys);
    } catch (const SjpError& e) {
        CHECK(e.kind() == Err::LengthMismatch);
    }
    CHECK_THROWS_AS(parse_plan("agent1: zoom\nagent2: good\n", f.sys), SjpError);
}

TEST_CASE("dimacs parsing pads short clauses and validates") {
    Cnf cnf = parse_dimacs("c comment\np cnf 3 2\n1 -2 0\n3 0\n");
    CHECK(cnf.num_vars == 3);
    REQUIRE(cnf.clauses.size() == 2);
    CHECK(cnf.clauses[0] == std::array<int, 3>{1, -2, 1});
    CHECK(cnf.clauses[1] == std::array<int, 3>{3, 3, 3});

    CHECK_THROWS_AS(parse_dimacs("p cnf 1 1\n1 1 1 1 0\n"), SjpError);
    CHECK_THROWS_AS(parse_dimacs("p cnf 1 1\n2 0\n"), SjpError);
    CHECK_THROWS_AS(parse_dimacs("1 0\n"), SjpError);

    Cnf back = parse_dimacs(serialize_dimacs(cnf));
    CHECK(back.clauses == cnf.clauses);
}
