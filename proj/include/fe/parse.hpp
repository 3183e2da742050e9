#pragma once

#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fe/error.hpp"
#include "fe/family.hpp"

namespace fe {

// Corpus label: T1 fully automated derivation, T2 verification of a stated
// answer only, T3 exploratory with no stated answer.
enum class Tier { T1, T2, T3 };

inline std::string tier_str(Tier t) {
    switch (t) {
        case Tier::T1: return "T1";
        case Tier::T2: return "T2";
        case Tier::T3: return "T3";
    }
    return {};
}

// Desk-scale brute-force window metadata for integer-domain problems.
struct OracleWindow {
    long long lo = 0, hi = 0, clo = 0, chi = 0;
};

// One `expect` block: a candidate family plus the expected solved
// constraint set, stored as canonicalized branches ("or" alternatives).
struct ExpectEntry {
    CandidateFamily family;
    bool has_where = false;
    std::vector<std::vector<Poly>> branches;  // each branch: constraints that must all hold
};

struct ProblemSpec {
    std::string id;
    DomainKind domain = DomainKind::Reals;
    DomainKind codomain = DomainKind::Reals;
    Fact equation;
    std::vector<std::pair<std::string, DomainKind>> parameters;
    std::vector<ExpectEntry> expected;
    Tier tier = Tier::T3;
    std::optional<OracleWindow> oracle;

    DomainCtx ctx() const {
        DomainCtx c;
        c.var_domain = domain;
        c.codomain = codomain;
        for (const auto& [n, d] : parameters) c.param_domains[n] = d;
        return c;
    }
};

// Sign- and content-normalized form used when comparing constraint sets:
// coprime integer coefficients, first (most structured) monomial positive.
inline Poly constraint_canon(const Poly& p) {
    if (p.is_zero()) return p;
    auto [k, q] = rational_content(p);
    return q.terms().begin()->second < 0 ? q.scaled(Rational(-1)) : q;
}

namespace lex {

struct Token {
    enum class Kind { Ident, Nat, String, Sym, End };
    Kind kind;
    std::string text;
    int line = 0, col = 0;
};

inline std::vector<Token> tokenize(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto prev_allows_domain = [&]() {
        if (out.empty()) return false;
        const auto& t = out.back().text;
        return t == ":" || t == "->";
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') { ++line; col = 1; ++i; continue; }
        if (c == ' ' || c == '\t' || c == '\r') { ++col; ++i; continue; }
        if (c == '#') {  // line comment
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        int tl = line, tc = col;
        if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < src.size() &&
                   (isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            std::string word = src.substr(i, j - i);
            // Domain tokens R+ and N* glue the trailing symbol, but only in
            // header positions so expressions keep + and * as operators.
            if (prev_allows_domain() && j < src.size() &&
                ((word == "R" && src[j] == '+') || (word == "N" && src[j] == '*'))) {
                word += src[j];
                ++j;
            }
            col += static_cast<int>(j - i);
            i = j;
            out.push_back({Token::Kind::Ident, word, tl, tc});
            continue;
        }
        if (isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < src.size() && isdigit(static_cast<unsigned char>(src[j]))) ++j;
            out.push_back({Token::Kind::Nat, src.substr(i, j - i), tl, tc});
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (c == '"') {
            size_t j = i + 1;
            while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
            if (j >= src.size() || src[j] != '"')
                throw FeError(FeError::Code::Syntax, "unterminated string", tl, tc);
            out.push_back({Token::Kind::String, src.substr(i + 1, j - i - 1), tl, tc});
            col += static_cast<int>(j + 1 - i);
            i = j + 1;
            continue;
        }
        if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
            out.push_back({Token::Kind::Sym, "->", tl, tc});
            i += 2;
            col += 2;
            continue;
        }
        std::string sym(1, c);
        if (std::string("{}()^*+-=:,/").find(c) == std::string::npos)
            throw FeError(FeError::Code::Syntax, std::string("unexpected character '") + c + "'",
                          tl, tc);
        out.push_back({Token::Kind::Sym, sym, tl, tc});
        ++i;
        ++col;
    }
    out.push_back({Token::Kind::End, "", line, col});
    return out;
}

}  // namespace lex

namespace detail {

// Classifies identifiers inside expressions. Returns nullopt to reject.
using IdentClassifier = std::function<std::optional<Expr>(const std::string&)>;

class TokenStream {
public:
    explicit TokenStream(std::vector<lex::Token> toks) : toks_(std::move(toks)) {}

    const lex::Token& peek(int ahead = 0) const {
        size_t i = pos_ + static_cast<size_t>(ahead);
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    lex::Token next() {
        const auto& t = peek();
        if (t.kind != lex::Token::Kind::End) ++pos_;
        return t;
    }
    bool at_sym(const std::string& s) const {
        return peek().kind == lex::Token::Kind::Sym && peek().text == s;
    }
    bool at_ident(const std::string& s) const {
        return peek().kind == lex::Token::Kind::Ident && peek().text == s;
    }
    bool eat_sym(const std::string& s) {
        if (!at_sym(s)) return false;
        next();
        return true;
    }
    void expect_sym(const std::string& s) {
        if (!eat_sym(s)) fail("expected '" + s + "'");
    }
    std::string expect_ident(const std::string& what) {
        if (peek().kind != lex::Token::Kind::Ident) fail("expected " + what);
        return next().text;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        const auto& t = peek();
        std::string got = t.kind == lex::Token::Kind::End ? "end of input" : "'" + t.text + "'";
        throw FeError(FeError::Code::Syntax, msg + ", got " + got, t.line, t.col);
    }

private:
    std::vector<lex::Token> toks_;
    size_t pos_ = 0;
};

// Recursive-descent expression parser over the corpus grammar:
//   expr := term (("+"|"-") term)* ; term := factor ("*" factor)*
//   factor := base ("^" NAT)?
//   base := NAT | NAT "/" NAT | IDENT | "f" "(" expr ")" | "(" expr ")" | "-" factor
class ExprParser {
public:
    ExprParser(TokenStream& ts, IdentClassifier cls) : ts_(ts), cls_(std::move(cls)) {}

    Expr expr() {
        Expr acc = term();
        while (ts_.at_sym("+") || ts_.at_sym("-")) {
            bool minus = ts_.next().text == "-";
            Expr t = term();
            acc = minus ? acc - t : acc + t;
        }
        return acc;
    }

    Expr term() {
        Expr acc = factor();
        while (ts_.at_sym("*")) {
            ts_.next();
            acc = acc * factor();
        }
        return acc;
    }

    Expr factor() {
        Expr b = base();
        if (ts_.at_sym("^")) {
            ts_.next();
            if (ts_.peek().kind != lex::Token::Kind::Nat) ts_.fail("expected natural exponent");
            long long e = std::stoll(ts_.next().text);
            if (e > 1'000'000) ts_.fail("exponent too large");
            b = Expr::power(b, static_cast<int>(e));
        }
        return b;
    }

    Expr base() {
        const auto& t = ts_.peek();
        if (t.kind == lex::Token::Kind::Nat) {
            ts_.next();
            BigInt n(t.text);
            // NAT "/" NAT is a rational literal.
            if (ts_.at_sym("/") && ts_.peek(1).kind == lex::Token::Kind::Nat) {
                ts_.next();
                BigInt d(ts_.next().text);
                if (d == 0) throw FeError(FeError::Code::Syntax, "zero denominator", t.line, t.col);
                return Expr::rational(make_rational(n, d));
            }
            return Expr::rational(Rational(n));
        }
        if (t.kind == lex::Token::Kind::Ident) {
            if (t.text == "f") {
                ts_.next();
                ts_.expect_sym("(");
                Expr arg = expr();
                if (ts_.at_sym(","))
                    throw FeError(FeError::Code::Syntax, "arity error: f takes one argument",
                                  ts_.peek().line, ts_.peek().col);
                ts_.expect_sym(")");
                return Expr::f(arg);
            }
            auto e = cls_(t.text);
            if (!e)
                throw FeError(FeError::Code::Syntax, "undeclared variable '" + t.text + "'",
                              t.line, t.col);
            ts_.next();
            return *e;
        }
        if (ts_.eat_sym("(")) {
            Expr inner = expr();
            ts_.expect_sym(")");
            return inner;
        }
        if (ts_.eat_sym("-")) return -factor();
        ts_.fail("expected expression");
    }

private:
    TokenStream& ts_;
    IdentClassifier cls_;
};

inline DomainKind parse_domain_token(TokenStream& ts) {
    const auto& t = ts.peek();
    if (t.kind != lex::Token::Kind::Ident) ts.fail("expected domain (R, R+, Q, Z, N*)");
    auto d = domain_parse(t.text);
    if (!d) ts.fail("unknown domain token '" + t.text + "'");
    ts.next();
    return *d;
}

inline long long parse_int(TokenStream& ts) {
    bool neg = ts.eat_sym("-");
    if (ts.peek().kind != lex::Token::Kind::Nat) ts.fail("expected integer");
    long long v = std::stoll(ts.next().text);
    return neg ? -v : v;
}

// Family right-hand side: the expression grammar extended with '/' inside
// terms, restricted to rational divisors and a single division by the
// family variable (the reciprocal-affine shape).
inline CandidateFamily parse_family_rhs(TokenStream& ts, const std::string& var) {
    IdentClassifier cls = [&](const std::string& name) -> std::optional<Expr> {
        if (name == var) return Expr::variable(name);
        return Expr::parameter(name);
    };
    ExprParser ep(ts, cls);

    Poly poly_part;   // polynomial in var
    Poly recip_part;  // coefficient of 1/var
    bool first = true;
    while (true) {
        bool minus = false;
        if (first) {
            minus = ts.eat_sym("-");
        } else if (ts.at_sym("+") || ts.at_sym("-")) {
            minus = ts.next().text == "-";
        } else {
            break;
        }
        first = false;
        // One term: factors with '*' and '/'.
        Expr num = ep.factor();
        Rational scale(1);
        int var_div = 0;
        while (ts.at_sym("*") || ts.at_sym("/")) {
            bool div = ts.next().text == "/";
            Expr fct = ep.factor();
            if (!div) {
                num = num * fct;
                continue;
            }
            Poly fp = normalize(fct);
            if (auto c = fp.as_constant()) {
                if (*c == 0) ts.fail("division by zero");
                scale /= *c;
            } else if (fp == Poly::from_atom(Atom::variable(var))) {
                ++var_div;
            } else {
                throw FeError(FeError::Code::Unsupported,
                              "family division must be by a constant or by " + var,
                              ts.peek().line, ts.peek().col);
            }
        }
        Poly termp = normalize(num).scaled(minus ? -scale : scale);
        if (var_div == 0) {
            poly_part += termp;
        } else if (var_div == 1) {
            if (contains_variable(termp, var))
                throw FeError(FeError::Code::Unsupported,
                              "unsupported family shape (variable over variable)");
            recip_part += termp;
        } else {
            throw FeError(FeError::Code::Unsupported, "unsupported family shape (1/" + var +
                                                          "^" + std::to_string(var_div) + ")");
        }
    }

    // Split the polynomial part by degree in the family variable.
    CandidateFamily fam;
    fam.poly_coeffs.assign(CandidateFamily::kMaxDegree + 1, Poly::zero());
    Atom va = Atom::variable(var);
    for (const auto& [m, c] : poly_part.terms()) {
        int deg = 0;
        Monomial rest;
        for (const auto& [a, p] : m.factors) {
            if (cmp(a, va) == 0) deg = p;
            else rest.factors.emplace_back(a, p);
        }
        if (deg > CandidateFamily::kMaxDegree)
            throw FeError(FeError::Code::Unsupported, "family degree exceeds 3");
        fam.poly_coeffs[deg] += Poly::from_monomial(rest, c);
    }
    fam.recip = recip_part;
    fam.finish_params();
    return fam;
}

}  // namespace detail

// Standalone expression parser used by tests and the CLI: identifiers in
// `vars` become variables, everything else a parameter when
// `free_idents_are_params` is set (otherwise an error).
inline Expr parse_expression(const std::string& text, const std::set<std::string>& vars,
                             bool free_idents_are_params = true) {
    detail::TokenStream ts(lex::tokenize(text));
    detail::IdentClassifier cls = [&](const std::string& n) -> std::optional<Expr> {
        if (vars.count(n)) return Expr::variable(n);
        if (free_idents_are_params) return Expr::parameter(n);
        return std::nullopt;
    };
    detail::ExprParser ep(ts, cls);
    Expr e = ep.expr();
    if (ts.peek().kind != lex::Token::Kind::End) ts.fail("trailing input");
    return e;
}

// Parses "f(x) = <rhs>" or a bare "<rhs>" (family variable defaults to x).
inline CandidateFamily parse_family(const std::string& text) {
    detail::TokenStream ts(lex::tokenize(text));
    std::string var = "x";
    if (ts.at_ident("f") && ts.peek(1).kind == lex::Token::Kind::Sym && ts.peek(1).text == "(" &&
        ts.peek(2).kind == lex::Token::Kind::Ident && ts.peek(3).text == ")" &&
        ts.peek(4).text == "=") {
        ts.next();
        ts.next();
        var = ts.next().text;
        ts.next();
        ts.next();
    }
    CandidateFamily fam = detail::parse_family_rhs(ts, var);
    if (ts.peek().kind != lex::Token::Kind::End) ts.fail("trailing input");
    return fam;
}

// Parses a problem block. See the corpus files for the concrete format:
//
//   problem "p20" {
//     domain: Z -> Z
//     tier: T1
//     oracle: -3:3 -6:6
//     forall x y : f(x - y + f(y)) = f(x) + f(y)
//     expect f(x) = a*x where a = 0 or a = 2
//   }
inline ProblemSpec parse_problem(const std::string& text) {
    detail::TokenStream ts(lex::tokenize(text));
    ProblemSpec spec;

    if (!ts.at_ident("problem")) ts.fail("expected 'problem'");
    ts.next();
    if (ts.peek().kind != lex::Token::Kind::String) ts.fail("expected problem id string");
    spec.id = ts.next().text;
    ts.expect_sym("{");

    bool saw_domain = false;
    std::optional<Tier> tier;
    while (true) {
        if (ts.at_ident("domain")) {
            ts.next();
            ts.expect_sym(":");
            spec.domain = detail::parse_domain_token(ts);
            if (!ts.eat_sym("->")) ts.fail("expected '->'");
            spec.codomain = detail::parse_domain_token(ts);
            saw_domain = true;
        } else if (ts.at_ident("param")) {
            ts.next();
            std::string name = ts.expect_ident("parameter name");
            if (name == "f") ts.fail("'f' is reserved");
            ts.expect_sym(":");
            DomainKind d = detail::parse_domain_token(ts);
            spec.parameters.emplace_back(name, d);
        } else if (ts.at_ident("tier")) {
            ts.next();
            ts.expect_sym(":");
            std::string t = ts.expect_ident("tier (T1|T2|T3)");
            if (t == "T1") tier = Tier::T1;
            else if (t == "T2") tier = Tier::T2;
            else if (t == "T3") tier = Tier::T3;
            else ts.fail("unknown tier '" + t + "'");
        } else if (ts.at_ident("oracle")) {
            ts.next();
            ts.expect_sym(":");
            OracleWindow w;
            w.lo = detail::parse_int(ts);
            ts.expect_sym(":");
            w.hi = detail::parse_int(ts);
            w.clo = detail::parse_int(ts);
            ts.expect_sym(":");
            w.chi = detail::parse_int(ts);
            spec.oracle = w;
        } else {
            break;
        }
    }
    if (!saw_domain) ts.fail("missing 'domain:' header");

    if (!ts.at_ident("forall")) ts.fail("expected 'forall'");
    ts.next();
    std::vector<std::string> vars;
    while (ts.peek().kind == lex::Token::Kind::Ident && !ts.at_sym(":")) {
        std::string v = ts.next().text;
        if (v == "f") ts.fail("'f' is reserved");
        for (const auto& [p, d] : spec.parameters)
            if (p == v) ts.fail("'" + v + "' is both a parameter and quantified");
        for (const auto& u : vars)
            if (u == v) ts.fail("duplicate quantified variable '" + v + "'");
        vars.push_back(v);
    }
    if (vars.empty()) ts.fail("expected quantified variables");
    ts.expect_sym(":");

    std::set<std::string> var_set(vars.begin(), vars.end());
    std::set<std::string> param_set;
    for (const auto& [p, d] : spec.parameters) param_set.insert(p);
    detail::IdentClassifier cls = [&](const std::string& n) -> std::optional<Expr> {
        if (var_set.count(n)) return Expr::variable(n);
        if (param_set.count(n)) return Expr::parameter(n);
        return std::nullopt;
    };
    detail::ExprParser ep(ts, cls);
    Expr lhs = ep.expr();
    ts.expect_sym("=");
    Expr rhs = ep.expr();

    spec.equation.lhs = normalize(lhs);
    spec.equation.rhs = normalize(rhs);
    for (const auto& v : vars) spec.equation.quantified.emplace_back(v, spec.domain);
    spec.equation.provenance = {"axiom", {}, spec.id};

    // Quantified variables must be exactly the ones the equation uses.
    std::set<std::string> used = free_variables(spec.equation.diff());
    for (const auto& v : vars)
        if (!used.count(v)) ts.fail("quantified variable '" + v + "' unused in equation");

    while (ts.at_ident("expect")) {
        ts.next();
        if (!ts.at_ident("f")) ts.fail("expected family 'f(<var>) = ...'");
        ts.next();
        ts.expect_sym("(");
        std::string fv = ts.expect_ident("family variable");
        ts.expect_sym(")");
        ts.expect_sym("=");
        ExpectEntry entry;
        entry.family = detail::parse_family_rhs(ts, fv);
        if (ts.at_ident("where")) {
            ts.next();
            entry.has_where = true;
            if (ts.at_ident("none")) {
                ts.next();
            } else {
                detail::IdentClassifier pcls = [&](const std::string& n) -> std::optional<Expr> {
                    return Expr::parameter(n);
                };
                detail::ExprParser cep(ts, pcls);
                std::vector<Poly> branch;
                while (true) {
                    Expr cl = cep.expr();
                    ts.expect_sym("=");
                    Expr cr = cep.expr();
                    branch.push_back(constraint_canon(normalize(cl - cr)));
                    if (ts.eat_sym(",")) continue;
                    if (ts.at_ident("or")) {
                        ts.next();
                        entry.branches.push_back(std::move(branch));
                        branch.clear();
                        continue;
                    }
                    break;
                }
                entry.branches.push_back(std::move(branch));
            }
        }
        spec.expected.push_back(std::move(entry));
    }

    ts.expect_sym("}");
    if (ts.peek().kind != lex::Token::Kind::End) ts.fail("trailing input after problem block");

    // Tier defaults and the T3 <=> no-expectations invariant.
    spec.tier = tier.value_or(spec.expected.empty() ? Tier::T3 : Tier::T2);
    if (spec.tier == Tier::T3 && !spec.expected.empty())
        throw FeError(FeError::Code::Syntax, "tier T3 requires no expect blocks");
    if (spec.tier != Tier::T3 && spec.expected.empty())
        throw FeError(FeError::Code::Syntax, "tier " + tier_str(spec.tier) +
                                                 " requires expect blocks");
    return spec;
}

inline std::string problem_str(const ProblemSpec& p) {
    std::string out = "problem " + p.id + "  " + domain_str(p.domain) + " -> " +
                      domain_str(p.codomain) + "  tier " + tier_str(p.tier) + "\n";
    for (const auto& [n, d] : p.parameters) out += "  param " + n + " : " + domain_str(d) + "\n";
    out += "  forall";
    for (const auto& [n, d] : p.equation.quantified) out += " " + n;
    out += " : " + render(p.equation.lhs) + " = " + render(p.equation.rhs) + "\n";
    for (const auto& e : p.expected) {
        out += "  expect " + e.family.str();
        if (!e.branches.empty()) {
            out += "  where ";
            for (size_t i = 0; i < e.branches.size(); ++i) {
                if (i) out += " or ";
                for (size_t j = 0; j < e.branches[i].size(); ++j) {
                    if (j) out += ", ";
                    out += render(e.branches[i][j]) + " = 0";
                }
            }
        }
        out += "\n";
    }
    return out;
}

}  // namespace fe
