#include <catch2/catch_amalgamated.hpp>

#include "fe/rewrite.hpp"
#include "test_util.hpp"

using namespace fe;
using fetest::Sampler;
using fetest::fact_holds;

namespace {

Expr V(const char* n) { return Expr::variable(n); }
Expr Pm(const char* n) { return Expr::parameter(n); }
Expr C(long long v) { return Expr::integer(v); }

Fact make_fact(const Expr& lhs, const Expr& rhs,
               std::vector<std::pair<std::string, DomainKind>> vars) {
    Fact f;
    f.lhs = normalize(lhs);
    f.rhs = normalize(rhs);
    f.quantified = std::move(vars);
    return f;
}

DomainCtx ctx_for(DomainKind dom, DomainKind codom) {
    DomainCtx c;
    c.var_domain = dom;
    c.codomain = codom;
    return c;
}

// intro: f(f(x)+y) = x + f(y) over Q
Fact intro_axiom() {
    Expr x = V("x"), y = V("y");
    return make_fact(Expr::f(Expr::f(x) + y), x + Expr::f(y),
                     {{"x", DomainKind::Rationals}, {"y", DomainKind::Rationals}});
}

}  // namespace

TEST_CASE("instantiate at ground points") {
    // f(f(x)+x*y) + f(y^2) = 2017x + y*f(x+y), at (0,0).
    Expr x = V("x"), y = V("y");
    Fact p = make_fact(Expr::f(Expr::f(x) + x * y) + Expr::f(Expr::power(y, 2)),
                       C(2017) * x + y * Expr::f(x + y),
                       {{"x", DomainKind::Reals}, {"y", DomainKind::Reals}});
    DomainCtx ctx = ctx_for(DomainKind::Reals, DomainKind::Reals);
    Fact at00 = instantiate(p, {{"x", C(0)}, {"y", C(0)}}, ctx);
    CHECK(at00.quantified.empty());
    CHECK(at00.diff() == normalize(Expr::f(Expr::f(C(0))) + Expr::f(C(0))));
    CHECK(at00.side_conditions.empty());
}

TEST_CASE("instantiate with the iteration substitution") {
    Fact p = intro_axiom();
    DomainCtx ctx = ctx_for(DomainKind::Rationals, DomainKind::Rationals);
    Expr x = V("x"), y = V("y"), z = V("z");
    Fact it = instantiate(p, {{"x", Expr::f(x) + z}}, ctx);
    CHECK(it.lhs == normalize(Expr::f(Expr::f(Expr::f(x) + z) + y)));
    CHECK(it.rhs == normalize(Expr::f(x) + z + Expr::f(y)));
    // z is fresh and gets quantified alongside the survivors.
    CHECK(it.quantified.size() == 3);
    CHECK(it.domain_of("z") == DomainKind::Rationals);
}

TEST_CASE("instantiate with identity bindings returns the same fact") {
    Fact p = intro_axiom();
    DomainCtx ctx = ctx_for(DomainKind::Rationals, DomainKind::Rationals);
    Fact same = instantiate(p, {}, ctx);
    CHECK(fact_key(same) == fact_key(p));
}

TEST_CASE("instantiate rejects non-quantified names") {
    Fact p = intro_axiom();
    DomainCtx ctx = ctx_for(DomainKind::Rationals, DomainKind::Rationals);
    CHECK_THROWS_AS(instantiate(p, {{"w", C(0)}}, ctx), FeError);
}

TEST_CASE("non-evident domain membership records a side condition") {
    // f(x+f(x)+y) = f(2x)+f(y) over R+, with y -> x - f(x).
    Expr x = V("x"), y = V("y");
    Fact p = make_fact(Expr::f(x + Expr::f(x) + y), Expr::f(C(2) * x) + Expr::f(y),
                       {{"x", DomainKind::PositiveReals}, {"y", DomainKind::PositiveReals}});
    DomainCtx ctx = ctx_for(DomainKind::PositiveReals, DomainKind::PositiveReals);
    Fact inst = instantiate(p, {{"y", x - Expr::f(x)}}, ctx);
    REQUIRE(inst.side_conditions.size() == 1);
    CHECK(inst.side_conditions[0].kind == SideCondition::Kind::Positive);
    CHECK(inst.side_conditions[0].expr == normalize(x - Expr::f(x)));
    CHECK(inst.conditional());

    // Positive images over R+ are evident and record nothing.
    Fact ok = instantiate(p, {{"y", x + C(1)}}, ctx);
    CHECK(ok.side_conditions.empty());
}

TEST_CASE("subtract cancels shared structure") {
    // f(f(x)+y) = f(x)+3x+y*f(y) over R+; P(s,y) - P(t,y).
    Expr x = V("x"), y = V("y"), s = V("s"), t = V("t");
    Fact p = make_fact(Expr::f(Expr::f(x) + y), Expr::f(x) + C(3) * x + y * Expr::f(y),
                       {{"x", DomainKind::PositiveReals}, {"y", DomainKind::PositiveReals}});
    DomainCtx ctx = ctx_for(DomainKind::PositiveReals, DomainKind::PositiveReals);
    Fact ps = instantiate(p, {{"x", s}}, ctx);
    Fact pt = instantiate(p, {{"x", t}}, ctx);
    Fact d = subtract(ps, pt);
    CHECK(d.diff() ==
          normalize(Expr::f(Expr::f(s) + y) - Expr::f(Expr::f(t) + y) -
                    (Expr::f(s) - Expr::f(t) + C(3) * (s - t))));
    CHECK(d.quantified.size() == 3);  // y, s, t

    // P(x,y) - P(x,y) is trivial.
    CHECK(subtract(p, p).trivial());
}

TEST_CASE("subtract merges tail bounds from both parents") {
    Expr x = V("x");
    Fact a = make_fact(Expr::f(x), x, {{"x", DomainKind::PositiveReals}});
    a.add_tail({"x", normalize(C(3))});
    Fact b = make_fact(Expr::f(x), x + C(1), {{"x", DomainKind::PositiveReals}});
    b.add_tail({"x", normalize(Pm("M"))});
    Fact d = subtract(a, b);
    REQUIRE(d.tail_bounds.size() == 2);
}

TEST_CASE("subtract rejects incompatible quantifier domains") {
    Expr x = V("x");
    Fact a = make_fact(Expr::f(x), x, {{"x", DomainKind::PositiveReals}});
    Fact b = make_fact(Expr::f(x), x, {{"x", DomainKind::Integers}});
    CHECK_THROWS_AS(subtract(a, b), FeError);
}

TEST_CASE("shift_difference is exactly subtract of a shifted instance") {
    Fact p = intro_axiom();
    DomainCtx ctx = ctx_for(DomainKind::Rationals, DomainKind::Rationals);
    Expr delta = Pm("c");
    Fact sd = shift_difference(p, "y", delta, ctx);
    Fact manual = subtract(instantiate(p, {{"y", V("y") + delta}}, ctx), p);
    CHECK(fact_key(sd) == fact_key(manual));

    // delta = 0 gives the trivial fact.
    CHECK(shift_difference(p, "y", C(0), ctx).trivial());
}

TEST_CASE("shift_difference then shift rewriting reproduces the imbalance") {
    // f(f(y)+x^2+1) + 2x = y + f(x+1)^2 over R, x shifted by c,
    // then rewrite with the cde relation f(t+c) = f(t)+c.
    Expr x = V("x"), y = V("y"), c = Pm("c");
    Fact p = make_fact(Expr::f(Expr::f(y) + Expr::power(x, 2) + C(1)) + C(2) * x,
                       y + Expr::power(Expr::f(x + C(1)), 2),
                       {{"x", DomainKind::Reals}, {"y", DomainKind::Reals}});
    DomainCtx ctx = ctx_for(DomainKind::Reals, DomainKind::Reals);

    Fact sd = shift_difference(p, "x", c, ctx);

    ShiftFact shift;
    shift.shift = normalize(c);
    shift.delta = normalize(c);
    Fact rule = shift_to_fact(shift, DomainKind::Reals);
    Fact rewritten = rewrite_with(rule, sd, Direction::LeftToRight, ctx);

    Expr big = Expr::f(Expr::power(x, 2) + Expr::f(y) + C(1) + C(2) * c * x + Expr::power(c, 2));
    Expr small = Expr::f(Expr::power(x, 2) + Expr::f(y) + C(1));
    Fact expected = make_fact(big + C(2) * c - small,
                              Expr::power(c, 2) + C(2) * c * Expr::f(x + C(1)),
                              {{"x", DomainKind::Reals}, {"y", DomainKind::Reals}});
    CHECK(monic(rewritten.diff()) == monic(expected.diff()));
}

TEST_CASE("ground shift peel extracts natural multiples") {
    // f(m^2+f(n)) = f(m)^2 + n over N*, m shifted by the parameter shift A.
    Expr m = V("m"), n = V("n"), A = Pm("A");
    Fact p = make_fact(Expr::f(Expr::power(m, 2) + Expr::f(n)), Expr::power(Expr::f(m), 2) + n,
                       {{"m", DomainKind::PositiveIntegers}, {"n", DomainKind::PositiveIntegers}});
    DomainCtx ctx = ctx_for(DomainKind::PositiveIntegers, DomainKind::PositiveIntegers);
    ctx.param_domains["A"] = DomainKind::PositiveIntegers;

    Fact sd = shift_difference(p, "m", A, ctx);

    ShiftFact shift;
    shift.shift = normalize(A);
    shift.delta = normalize(A);

    Fact cur = sd;
    int guard = 0;
    while (auto next = try_shift_peel(cur, shift, DomainKind::PositiveIntegers, ctx)) {
        cur = *next;
        REQUIRE(++guard < 10);
    }
    // Everything peels away, leaving 2Am = 2Af(m).
    CHECK(cur.diff() == normalize(C(2) * A * m - C(2) * A * Expr::f(m)));
}

TEST_CASE("rewrite_with rewrites the innermost matching subterm") {
    Fact p = intro_axiom();
    DomainCtx ctx = ctx_for(DomainKind::Rationals, DomainKind::Rationals);
    Expr x = V("x"), y = V("y"), z = V("z");
    Fact target = instantiate(p, {{"x", Expr::f(x) + z}}, ctx);

    Fact rewritten = rewrite_with(p, target, Direction::LeftToRight, ctx);
    Fact expected = make_fact(Expr::f(x + Expr::f(z) + y), Expr::f(x) + Expr::f(y) + z,
                              {{"x", DomainKind::Rationals},
                               {"y", DomainKind::Rationals},
                               {"z", DomainKind::Rationals}});
    CHECK(monic(rewritten.diff()) == monic(expected.diff()));

    // Applying the axiom once more yields Cauchy's equation.
    Fact again = rewrite_with(p, rewritten, Direction::LeftToRight, ctx);
    CHECK(monic(again.diff()) ==
          monic(normalize(Expr::f(x + y) - Expr::f(x) - Expr::f(y))));
}

TEST_CASE("rewrite_with applies a cde relation to a matching argument") {
    Expr x = V("x"), c = Pm("c");
    ShiftFact shift;
    shift.shift = normalize(c);
    shift.delta = normalize(c);
    Fact rule = shift_to_fact(shift, DomainKind::PositiveReals);
    DomainCtx ctx = ctx_for(DomainKind::PositiveReals, DomainKind::PositiveReals);

    Fact target = make_fact(Expr::f(x + c), x, {{"x", DomainKind::PositiveReals}});
    Fact rewritten = rewrite_with(rule, target, Direction::LeftToRight, ctx);
    CHECK(rewritten.diff() == normalize(Expr::f(x) + c - x));

    // No c in the argument: no match.
    Fact nomatch = make_fact(Expr::f(x), x, {{"x", DomainKind::PositiveReals}});
    CHECK_THROWS_AS(rewrite_with(rule, nomatch, Direction::LeftToRight, ctx), FeError);
}

TEST_CASE("homogeneity rewrite halves even arguments") {
    Expr x = V("x"), y = V("y"), z = V("z");
    Fact target = make_fact(Expr::f(C(4) * x + C(2) * y), z,
                            {{"x", DomainKind::Integers},
                             {"y", DomainKind::Integers},
                             {"z", DomainKind::Integers}});
    auto once = try_homogeneity_rewrite(target, Rational(2));
    REQUIRE(once);
    CHECK(once->diff() == normalize(C(2) * Expr::f(C(2) * x + y) - z));
    // Odd coefficients stop the chain.
    CHECK_FALSE(try_homogeneity_rewrite(*once, Rational(2)));
}

TEST_CASE("moves are model-sound on random rational points") {
    // Witnesses satisfying the intro axiom: f(x)=x and f(x)=-x.
    Fact p = intro_axiom();
    DomainCtx ctx = ctx_for(DomainKind::Rationals, DomainKind::Rationals);
    Expr x = V("x"), z = V("z");

    std::vector<Fact> derived;
    derived.push_back(instantiate(p, {{"x", C(0)}}, ctx));
    derived.push_back(instantiate(p, {{"x", V("y")}, {"y", x}}, ctx));  // swap
    derived.push_back(instantiate(p, {{"x", Expr::f(x) + z}}, ctx));
    derived.push_back(rewrite_with(p, derived.back(), Direction::LeftToRight, ctx));
    derived.push_back(rewrite_with(p, derived.back(), Direction::LeftToRight, ctx));
    derived.push_back(shift_difference(p, "y", C(1), ctx));
    derived.push_back(subtract(p, derived[1]));

    for (auto [a, b] : {std::pair<int, int>{1, 0}, {-1, 0}}) {
        Witness w = affine_witness(Rational(a), Rational(b));
        Sampler s(777);
        for (const auto& f : derived) {
            REQUIRE(fact_holds(f, DomainKind::Rationals, w, 1000, s));
        }
    }
}
