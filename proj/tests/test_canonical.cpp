#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fe/render.hpp"

using namespace fe;

namespace {

Expr V(const char* n) { return Expr::variable(n); }
Expr P(const char* n) { return Expr::parameter(n); }
Expr C(long long v) { return Expr::integer(v); }

// Random expression corpus for the property suites. Fixed seed, bounded
// depth, small constants.
struct Gen {
    std::mt19937_64 rng;
    explicit Gen(unsigned long long seed) : rng(seed) {}

    int pick(int n) { return static_cast<int>(rng() % static_cast<unsigned long long>(n)); }

    Expr expr(int depth) {
        if (depth <= 0) return leaf();
        switch (pick(7)) {
            case 0: case 1: return Expr::sum({expr(depth - 1), expr(depth - 1)});
            case 2: case 3: return Expr::product({expr(depth - 1), expr(depth - 1)});
            case 4: return Expr::power(expr(depth - 1), 2 + pick(2));
            case 5: return Expr::f(expr(depth - 1));
            default: return leaf();
        }
    }

    Expr leaf() {
        switch (pick(4)) {
            case 0: return V(pick(2) ? "x" : "y");
            case 1: return P(pick(2) ? "c" : "d");
            default: return Expr::rational(Rational(pick(9) - 4, 1 + pick(3)));
        }
    }

    Rational rat() { return Rational(pick(41) - 20, 1 + pick(9)); }
};

std::map<std::string, Rational> random_env(Gen& g) {
    return {{"x", g.rat()}, {"y", g.rat()}, {"c", g.rat()}, {"d", g.rat()}};
}

}  // namespace

TEST_CASE("binomial difference exposes the imbalance") {
    Expr x = V("x"), c = P("c");
    Poly p = normalize(Expr::power(x + c, 2) - Expr::power(x, 2));
    CHECK(render(p) == "2*c*x + c^2");
}

TEST_CASE("cancellation to the zero polynomial") {
    Expr x = V("x");
    Poly p = normalize(Expr::f(x) - Expr::f(x));
    CHECK(p.is_zero());
    CHECK(render(p) == "0");
    CHECK(normalize(C(0)) == p);
}

TEST_CASE("argument canonicalization merges f-atoms") {
    Expr x = V("x"), y = V("y");
    Poly p = normalize(Expr::f(x + C(0) * y) + C(2) * Expr::f(x));
    CHECK(render(p) == "3*f(x)");
}

TEST_CASE("equality is canonical-map identity") {
    Expr x = V("x"), y = V("y"), c = P("c");
    CHECK(normalize(C(2) * c * x + Expr::power(c, 2)) ==
          normalize(Expr::power(x + c, 2) - Expr::power(x, 2)));
    CHECK(normalize(Expr::f(x) + Expr::f(y)) != normalize(Expr::f(x + y)));
    CHECK(normalize(C(0)) == Poly::zero());
}

TEST_CASE("rationals stay reduced with positive denominators") {
    Poly p = normalize(Expr::rational(Rational(3, 6)));
    CHECK(render(p) == "1/2");
    CHECK(render(normalize(Expr::rational(make_rational(2, -4)))) == "-1/2");
}

TEST_CASE("substitution is structural and renormalizes") {
    Expr x = V("x"), y = V("y"), z = V("z"), c = P("c");

    // Iteration step: x -> f(x)+z inside f(f(x)+y).
    Poly it = substitute(Expr::f(Expr::f(x) + y), {{"x", Expr::f(x) + z}});
    CHECK(it == normalize(Expr::f(Expr::f(Expr::f(x) + z) + y)));
    CHECK(render(it) == "f(y + f(z + f(x)))");

    // Shifted square: x -> x+c in x^2 + f(y) + 1.
    Poly sq = substitute(Expr::power(x, 2) + Expr::f(y) + C(1), {{"x", x + c}});
    CHECK(sq == normalize(Expr::power(x, 2) + C(2) * c * x + Expr::power(c, 2) + Expr::f(y) + C(1)));

    // Empty bindings are the identity.
    Expr e = Expr::f(x * y) + c;
    CHECK(substitute(e, {}) == normalize(e));
}

TEST_CASE("normalize is idempotent on a random corpus") {
    Gen g(20240811);
    for (int i = 0; i < 300; ++i) {
        Expr e = g.expr(4);
        Poly once = normalize(e);
        Poly twice = normalize(to_expr(once));
        REQUIRE(once == twice);
    }
}

TEST_CASE("model soundness: normalization preserves evaluation") {
    Gen g(987654321);
    Witness w = affine_witness(Rational(2), Rational(0));
    for (int i = 0; i < 300; ++i) {
        Expr e = g.expr(4);
        auto env = random_env(g);
        REQUIRE(eval(e, env, w) == eval(normalize(e), env, w));
    }
}

TEST_CASE("substitution composes on disjoint targets") {
    Gen g(13579);
    for (int i = 0; i < 200; ++i) {
        Expr e = g.expr(3);
        Bindings sigma = {{"x", g.expr(2)}};
        Bindings tau = {{"y", g.expr(2)}};
        // tau must not touch sigma's image variables and vice versa; build
        // tau over a variable sigma never introduces by renaming x out.
        Bindings tau_clean;
        for (auto& [k, v] : tau) tau_clean[k] = replace_vars(v, {{"x", Expr::parameter("c")}});
        Poly lhs = substitute(to_expr(substitute(e, sigma)), tau_clean);
        Bindings composed = tau_clean;
        composed["x"] = to_expr(substitute(sigma.at("x"), tau_clean));
        Poly rhs = substitute(e, composed);
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("atom order is a total order") {
    Gen g(24680);
    std::vector<Poly> args;
    for (int i = 0; i < 12; ++i) args.push_back(normalize(g.expr(2)));
    std::vector<Atom> atoms = {Atom::variable("x"), Atom::variable("y"), Atom::parameter("c"),
                               Atom::parameter("x")};
    for (auto& a : args) atoms.push_back(Atom::fapply(std::make_shared<const Poly>(a)));

    for (const auto& a : atoms)
        for (const auto& b : atoms) {
            // Antisymmetry.
            REQUIRE(cmp(a, b) == -cmp(b, a));
            for (const auto& c : atoms) {
                // Transitivity.
                if (cmp(a, b) <= 0 && cmp(b, c) <= 0) REQUIRE(cmp(a, c) <= 0);
            }
        }
}

TEST_CASE("power constructor collapses trivial exponents") {
    Expr x = V("x");
    CHECK(render(Expr::power(x, 1)) == "x");
    CHECK(render(Expr::power(x, 0)) == "1");
    CHECK(render(Expr::power(x + C(1), 2)) == "2*x + x^2 + 1");
}

TEST_CASE("exact division and content extraction") {
    Expr x = V("x"), m = V("m");
    Poly c = normalize(C(1) + Expr::power(Expr::f(C(1)), 2));
    Poly prod = c * normalize(m - Expr::f(m));
    auto q = exact_div(prod, c);
    REQUIRE(q);
    CHECK(*q == normalize(m - Expr::f(m)));
    CHECK_FALSE(exact_div(normalize(x + C(1)), normalize(x * x)));

    auto [content, scaled] = rational_content(normalize(C(4) * x + C(6)));
    CHECK(content == Rational(2));
    CHECK(render(scaled) == "2*x + 3");

    auto [mono, rest] = monomial_content(normalize(x * Expr::f(x) * Expr::f(m) -
                                                   m * Expr::f(m) * Expr::f(x)));
    CHECK(mono.factors.size() == 2);
    CHECK(render(rest) == "-m + x");
}
