#include <catch2/catch_amalgamated.hpp>

#include "fe/verify.hpp"
#include "test_util.hpp"

using namespace fe;
using fetest::load_corpus;

namespace {

ConstraintSet run(const std::string& id, const std::string& family) {
    ProblemSpec p = load_corpus(id);
    return substitute_candidate(p, parse_family(family));
}

}  // namespace

TEST_CASE("every corpus file parses") {
    const char* ids[] = {"intro", "p01", "p02", "p03", "p04", "p05", "p06", "p07",
                         "p08",   "p09", "p10", "p11", "p12", "p13", "p14", "p15",
                         "p16",   "p17", "p18", "p19", "p20", "p21", "p22", "p23",
                         "p24",   "p25", "p26", "p27", "p28", "practice1", "practice2",
                         "practice3", "practice4", "practice5", "practice6", "practice7"};
    for (const char* id : ids) {
        INFO(id);
        ProblemSpec p = load_corpus(id);
        CHECK(p.id == id);
    }
}

TEST_CASE("coefficient matching produces the expected raw constraints") {
    // intro with f = c*x: a single constraint c^2 - 1 = 0.
    ConstraintSet intro = run("intro", "c*x");
    REQUIRE(intro.constraints.size() == 1);
    CHECK(render(intro.constraints[0]) == "c^2 - 1");

    // p01 with f = c*x: c^2 - 2017 = 0.
    ConstraintSet p01 = run("p01", "c*x");
    REQUIRE(p01.constraints.size() == 1);
    CHECK(render(p01.constraints[0]) == "c^2 - 2017");

    // p18 with f = c*x and equation parameter n: n - c^2 - c = 0.
    ConstraintSet p18 = run("p18", "c*x");
    REQUIRE(p18.constraints.size() == 1);
    CHECK(render(p18.constraints[0]) == "c + c^2 - n");
}

TEST_CASE("solving branches on rational roots") {
    ConstraintSet intro = solve_constraints(run("intro", "c*x"));
    CHECK(intro.status == ConstraintSet::Status::Satisfiable);
    REQUIRE(intro.branches.size() == 2);
    CHECK(intro.branches[0].assignment.at("c") == -1);
    CHECK(intro.branches[1].assignment.at("c") == 1);
}

TEST_CASE("irrational-only constraints stay residual") {
    ConstraintSet p01 = solve_constraints(run("p01", "c*x"));
    CHECK(p01.status == ConstraintSet::Status::Residual);
    REQUIRE(p01.branches.size() == 1);
    REQUIRE(p01.branches[0].residual.size() == 1);
    CHECK(ConstraintSet::equation_str(p01.branches[0].residual[0]) == "c^2 = 2017");
}

TEST_CASE("multi-parameter relation stays residual in exact form") {
    ConstraintSet p18 = solve_constraints(run("p18", "c*x"));
    CHECK(p18.status == ConstraintSet::Status::Residual);
    REQUIRE(p18.branches.size() == 1);
    CHECK(ConstraintSet::equation_str(p18.branches[0].residual[0]) == "c + c^2 = n");
}

TEST_CASE("linear assignments solve directly") {
    // p07 with f = x + a: a = 0.
    ConstraintSet p07 = solve_constraints(run("p07", "x + a"));
    CHECK(p07.status == ConstraintSet::Status::Satisfiable);
    REQUIRE(p07.branches.size() == 1);
    CHECK(p07.branches[0].assignment.at("a") == 0);
}

TEST_CASE("cubic roots: p19 admits 0, 1, -1") {
    ConstraintSet p19 = solve_constraints(run("p19", "a*x"));
    CHECK(p19.status == ConstraintSet::Status::Satisfiable);
    REQUIRE(p19.branches.size() == 3);
    std::set<Rational> roots;
    for (const auto& b : p19.branches) roots.insert(b.assignment.at("a"));
    CHECK(roots == std::set<Rational>{Rational(-1), Rational(0), Rational(1)});
}

TEST_CASE("p20 admits 0 and 2") {
    ConstraintSet p20 = solve_constraints(run("p20", "a*x"));
    REQUIRE(p20.branches.size() == 2);
    CHECK(p20.branches[0].assignment.at("a") == 0);
    CHECK(p20.branches[1].assignment.at("a") == 2);
}

TEST_CASE("reciprocal family clears denominators and discharges over R+") {
    ConstraintSet p28 = solve_constraints(run("p28", "a/x + b"));
    CHECK(p28.status == ConstraintSet::Status::Satisfiable);
    REQUIRE(p28.branches.size() == 1);
    CHECK(p28.branches[0].assignment.at("a") == 1);
    CHECK(p28.branches[0].assignment.at("b") == 0);
    CHECK_FALSE(p28.rejected.empty());  // a = 0, b = 0 fails positivity
    CHECK_FALSE(p28.conditions.empty());
}

TEST_CASE("verify_concrete accepts the stated answers") {
    CHECK(verify_concrete(load_corpus("p23"), parse_family("2016*x")));
    CHECK(verify_concrete(load_corpus("p21"), parse_family("-1")));
    CHECK(verify_concrete(load_corpus("p21"), parse_family("x + 1")));
    CHECK(verify_concrete(load_corpus("p06"), parse_family("x + 1")));
    CHECK(verify_concrete(load_corpus("p26"), parse_family("x")));
    CHECK(verify_concrete(load_corpus("p26"), parse_family("0")));
    CHECK(verify_concrete(load_corpus("p27"), parse_family("x")));
    CHECK(verify_concrete(load_corpus("p28"), parse_family("1/x")));
    CHECK(verify_concrete(load_corpus("p22"), parse_family("x")));
    CHECK(verify_concrete(load_corpus("p22"), parse_family("-x")));
    CHECK(verify_concrete(load_corpus("p22"), parse_family("0")));
}

TEST_CASE("verify_concrete rejects near-miss mutants") {
    CHECK_FALSE(verify_concrete(load_corpus("p06"), parse_family("x")));
    CHECK_FALSE(verify_concrete(load_corpus("p21"), parse_family("x")));
    CHECK_FALSE(verify_concrete(load_corpus("p23"), parse_family("2015*x")));
    CHECK_FALSE(verify_concrete(load_corpus("p23"), parse_family("-2016*x")));
    CHECK_FALSE(verify_concrete(load_corpus("p28"), parse_family("2/x")));
    // Sign-flipped p01 constant offered as the rational 44.
    CandidateFamily mut = parse_family("c*x").assigned({{"c", Rational(44)}});
    CHECK_FALSE(verify_concrete(load_corpus("p01"), mut));
}

TEST_CASE("expectations compare canonical constraint sets") {
    ProblemSpec intro = load_corpus("intro");
    ConstraintSet s = solve_constraints(substitute_candidate(intro, intro.expected[0].family));
    CHECK(expectation_met(intro, intro.expected[0], s));

    ProblemSpec p18 = load_corpus("p18");
    ConstraintSet s18 = solve_constraints(substitute_candidate(p18, p18.expected[0].family));
    CHECK(expectation_met(p18, p18.expected[0], s18));

    // A mutated expectation must not match.
    ProblemSpec mut = intro;
    mut.expected[0].branches.pop_back();
    CHECK_FALSE(expectation_met(mut, mut.expected[0], s));
}

TEST_CASE("free-parameter families verify with empty constraint sets") {
    for (const char* id : {"p02", "p16", "p17"}) {
        ProblemSpec p = load_corpus(id);
        ConstraintSet s = solve_constraints(substitute_candidate(p, p.expected[0].family));
        CHECK(s.status == ConstraintSet::Status::Satisfiable);
        CHECK(s.constraints.empty());
        CHECK(expectation_met(p, p.expected[0], s));
    }
}

TEST_CASE("every corpus expectation is met") {
    const char* ids[] = {"intro", "p01", "p02", "p03", "p04", "p06", "p07", "p08", "p09",
                         "p10",   "p11", "p12", "p13", "p14", "p15", "p16", "p17", "p18",
                         "p19",   "p20", "p21", "p22", "p23", "p24", "p25", "p26", "p27", "p28"};
    for (const char* id : ids) {
        ProblemSpec p = load_corpus(id);
        for (size_t i = 0; i < p.expected.size(); ++i) {
            INFO(std::string(id) + " expect #" + std::to_string(i));
            ConstraintSet s = solve_constraints(substitute_candidate(p, p.expected[i].family));
            CHECK(expectation_met(p, p.expected[i], s));
        }
    }
}

TEST_CASE("solutions evaluate exactly at random admissible points") {
    // Soundness: a verified closed form has zero residual everywhere.
    fetest::Sampler smp(5150);
    struct Case { const char* id; const char* fam; };
    for (const Case& c : {Case{"p23", "2016*x"}, Case{"p06", "x + 1"}, Case{"intro", "x"},
                          Case{"p20", "2*x"}, Case{"p28", "1/x"}}) {
        ProblemSpec p = load_corpus(c.id);
        CandidateFamily fam = parse_family(c.fam);
        for (int i = 0; i < 1000; ++i) {
            std::map<std::string, Rational> env;
            for (const auto& [v, d] : p.equation.quantified) env[v] = smp.rat(d);
            Witness w = [&](const Rational& t) {
                auto r = fam.eval_at(t);
                REQUIRE(r);
                return *r;
            };
            REQUIRE(eval(p.equation.lhs, env, w) == eval(p.equation.rhs, env, w));
        }
    }
}
