#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fe/expr.hpp"
#include "fe/rational.hpp"

namespace fe {

class Poly;
using PolyPtr = std::shared_ptr<const Poly>;

// Atoms are the indeterminates of the canonical polynomial form: variables,
// parameters, and whole f-applications (with canonical arguments). No
// algebraic relation between distinct f-atoms is assumed at this layer.
struct Atom {
    enum class Kind { Variable, Parameter, FApply };
    Kind kind;
    std::string name;  // Variable / Parameter
    PolyPtr arg;       // FApply

    static Atom variable(std::string n) { return {Kind::Variable, std::move(n), nullptr}; }
    static Atom parameter(std::string n) { return {Kind::Parameter, std::move(n), nullptr}; }
    static Atom fapply(PolyPtr a) { return {Kind::FApply, {}, std::move(a)}; }
};

int cmp(const Atom& a, const Atom& b);
int cmp(const Poly& a, const Poly& b);

// Multiset of atom^power factors, kept sorted by the atom order with
// powers >= 1. The empty monomial is the constant term.
struct Monomial {
    std::vector<std::pair<Atom, int>> factors;

    bool is_constant() const { return factors.empty(); }
    int degree() const {
        int d = 0;
        for (const auto& [a, p] : factors) d += p;
        return d;
    }
};

// Total order: compare factor lists pairwise (atom, then ascending power);
// a monomial that is a strict prefix-extension sorts before the shorter
// one, so constant terms come last.
inline int cmp(const Monomial& a, const Monomial& b) {
    size_t n = std::min(a.factors.size(), b.factors.size());
    for (size_t i = 0; i < n; ++i) {
        if (int c = cmp(a.factors[i].first, b.factors[i].first)) return c;
        if (a.factors[i].second != b.factors[i].second)
            return a.factors[i].second < b.factors[i].second ? -1 : 1;
    }
    if (a.factors.size() == b.factors.size()) return 0;
    return a.factors.size() > b.factors.size() ? -1 : 1;
}

struct MonomialLess {
    bool operator()(const Monomial& a, const Monomial& b) const { return cmp(a, b) < 0; }
};

inline Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial out;
    size_t i = 0, j = 0;
    while (i < a.factors.size() && j < b.factors.size()) {
        int c = cmp(a.factors[i].first, b.factors[j].first);
        if (c < 0) out.factors.push_back(a.factors[i++]);
        else if (c > 0) out.factors.push_back(b.factors[j++]);
        else {
            out.factors.emplace_back(a.factors[i].first, a.factors[i].second + b.factors[j].second);
            ++i, ++j;
        }
    }
    while (i < a.factors.size()) out.factors.push_back(a.factors[i++]);
    while (j < b.factors.size()) out.factors.push_back(b.factors[j++]);
    return out;
}

// a / b if every factor of b divides a with enough multiplicity.
inline std::optional<Monomial> mono_div(const Monomial& a, const Monomial& b) {
    Monomial out;
    size_t i = 0;
    for (const auto& [atom, pow] : b.factors) {
        while (i < a.factors.size() && cmp(a.factors[i].first, atom) < 0)
            out.factors.push_back(a.factors[i++]);
        if (i == a.factors.size() || cmp(a.factors[i].first, atom) != 0) return std::nullopt;
        if (a.factors[i].second < pow) return std::nullopt;
        if (a.factors[i].second > pow)
            out.factors.emplace_back(a.factors[i].first, a.factors[i].second - pow);
        ++i;
    }
    while (i < a.factors.size()) out.factors.push_back(a.factors[i++]);
    return out;
}

// Polynomial over atoms with nonzero exact-rational coefficients; the zero
// polynomial is the empty map. This is the CanonicalExpression type: the
// map order makes every enumeration deterministic and canonicalization
// idempotent by construction.
class Poly {
public:
    using Terms = std::map<Monomial, Rational, MonomialLess>;

    Poly() = default;

    static Poly zero() { return Poly(); }
    static Poly constant(Rational q) {
        Poly p;
        if (q != 0) p.terms_[Monomial{}] = std::move(q);
        return p;
    }
    static Poly from_atom(Atom a, int power = 1) {
        Poly p;
        Monomial m;
        m.factors.emplace_back(std::move(a), power);
        p.terms_[std::move(m)] = Rational(1);
        return p;
    }
    static Poly from_monomial(Monomial m, Rational c) {
        Poly p;
        if (c != 0) p.terms_[std::move(m)] = std::move(c);
        return p;
    }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    size_t size() const { return terms_.size(); }

    std::optional<Rational> as_constant() const {
        if (terms_.empty()) return Rational(0);
        if (terms_.size() == 1 && terms_.begin()->first.is_constant()) return terms_.begin()->second;
        return std::nullopt;
    }

    Rational coeff(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void add_term(const Monomial& m, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Poly& operator+=(const Poly& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

    Poly scaled(const Rational& k) const {
        Poly out;
        if (k == 0) return out;
        for (const auto& [m, c] : terms_) out.terms_[m] = c * k;
        return out;
    }

    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly out;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) out.add_term(mono_mul(ma, mb), ca * cb);
        return out;
    }

    Poly pow(int e) const {
        if (e < 0) throw std::invalid_argument("Poly::pow: negative exponent");
        if (e == 0) return constant(Rational(1));
        if (terms_.empty()) return zero();
        // Single-term fast path keeps large atom powers (x^2015) cheap.
        if (terms_.size() == 1) {
            const auto& [m, c] = *terms_.begin();
            Monomial out = m;
            for (auto& [a, p] : out.factors) p *= e;
            return from_monomial(std::move(out), rat_pow(c, e));
        }
        if (e > 64) throw std::invalid_argument("Poly::pow: exponent too large to expand");
        Poly acc = constant(Rational(1));
        for (int i = 0; i < e; ++i) acc = acc * *this;
        return acc;
    }

    // Greatest monomial in the canonical order (requires nonzero).
    const std::pair<const Monomial, Rational>& lead() const {
        if (terms_.empty()) throw std::logic_error("Poly::lead: zero polynomial");
        return *terms_.rbegin();
    }

    bool operator==(const Poly& o) const { return cmp(*this, o) == 0; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

private:
    Terms terms_;
};

// Structural total order on atoms: constructor tag, then name, then the
// recursive argument order for f-applications.
inline int cmp(const Atom& a, const Atom& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind) ? -1 : 1;
    switch (a.kind) {
        case Atom::Kind::Variable:
        case Atom::Kind::Parameter:
            return a.name.compare(b.name) < 0 ? -1 : (a.name == b.name ? 0 : 1);
        case Atom::Kind::FApply:
            if (a.arg == b.arg) return 0;
            return cmp(*a.arg, *b.arg);
    }
    return 0;
}

inline int cmp(const Poly& a, const Poly& b) {
    auto ia = a.terms().begin(), ib = b.terms().begin();
    for (; ia != a.terms().end() && ib != b.terms().end(); ++ia, ++ib) {
        if (int c = cmp(ia->first, ib->first)) return c;
        if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
    }
    if (ia != a.terms().end()) return 1;
    if (ib != b.terms().end()) return -1;
    return 0;
}

struct PolyLess {
    bool operator()(const Poly& a, const Poly& b) const { return cmp(a, b) < 0; }
    bool operator()(const PolyPtr& a, const PolyPtr& b) const { return cmp(*a, *b) < 0; }
};

// ---- canonicalization ----

inline Poly normalize(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Variable:
            return Poly::from_atom(Atom::variable(e.node().name));
        case ExprKind::Parameter:
            return Poly::from_atom(Atom::parameter(e.node().name));
        case ExprKind::Constant:
            return Poly::constant(e.node().value);
        case ExprKind::FApply:
            return Poly::from_atom(
                Atom::fapply(std::make_shared<const Poly>(normalize(e.node().kids[0]))));
        case ExprKind::Sum: {
            Poly acc;
            for (const auto& k : e.node().kids) acc += normalize(k);
            return acc;
        }
        case ExprKind::Product: {
            Poly acc = Poly::constant(Rational(1));
            for (const auto& k : e.node().kids) acc = acc * normalize(k);
            return acc;
        }
        case ExprKind::Power:
            return normalize(e.node().kids[0]).pow(e.node().exponent);
    }
    throw std::logic_error("normalize: bad kind");
}

inline Expr to_expr(const Poly& p);

inline Expr to_expr(const Atom& a) {
    switch (a.kind) {
        case Atom::Kind::Variable: return Expr::variable(a.name);
        case Atom::Kind::Parameter: return Expr::parameter(a.name);
        case Atom::Kind::FApply: return Expr::f(to_expr(*a.arg));
    }
    throw std::logic_error("to_expr: bad atom");
}

inline Expr to_expr(const Monomial& m, const Rational& c) {
    std::vector<Expr> factors;
    if (c != 1 || m.is_constant()) factors.push_back(Expr::rational(c));
    for (const auto& [a, p] : m.factors) factors.push_back(Expr::power(to_expr(a), p));
    return Expr::product(std::move(factors));
}

inline Expr to_expr(const Poly& p) {
    std::vector<Expr> terms;
    for (const auto& [m, c] : p.terms()) terms.push_back(to_expr(m, c));
    return Expr::sum(std::move(terms));
}

// Substitution with the canonical-form post condition from the core
// contract: structural replacement, then normalization.
inline Poly substitute(const Expr& e, const Bindings& bindings) {
    return normalize(replace_vars(e, bindings));
}

inline Poly substitute(const Poly& p, const Bindings& bindings) {
    return substitute(to_expr(p), bindings);
}

// ---- queries ----

inline int depth(const Poly& p);

inline int depth(const Atom& a) { return a.kind == Atom::Kind::FApply ? 1 + depth(*a.arg) : 0; }

// Maximum f-nesting depth.
inline int depth(const Poly& p) {
    int d = 0;
    for (const auto& [m, c] : p.terms())
        for (const auto& [a, pw] : m.factors) d = std::max(d, depth(a));
    return d;
}

inline void collect_names(const Poly& p, std::set<std::string>& vars, std::set<std::string>& params);

inline void collect_names(const Atom& a, std::set<std::string>& vars,
                          std::set<std::string>& params) {
    switch (a.kind) {
        case Atom::Kind::Variable: vars.insert(a.name); break;
        case Atom::Kind::Parameter: params.insert(a.name); break;
        case Atom::Kind::FApply: collect_names(*a.arg, vars, params); break;
    }
}

inline void collect_names(const Poly& p, std::set<std::string>& vars,
                          std::set<std::string>& params) {
    for (const auto& [m, c] : p.terms())
        for (const auto& [a, pw] : m.factors) collect_names(a, vars, params);
}

inline std::set<std::string> free_variables(const Poly& p) {
    std::set<std::string> vars, params;
    collect_names(p, vars, params);
    return vars;
}

inline bool contains_variable(const Poly& p, const std::string& name) {
    return free_variables(p).count(name) > 0;
}

inline bool contains_f(const Poly& p) {
    for (const auto& [m, c] : p.terms())
        for (const auto& [a, pw] : m.factors)
            if (a.kind == Atom::Kind::FApply) return true;
    return false;
}

// Every f-atom occurring anywhere in p, including nested ones, in
// canonical order, innermost (shallowest nesting) first.
inline void collect_f_atoms(const Poly& p, std::vector<Atom>& out) {
    for (const auto& [m, c] : p.terms())
        for (const auto& [a, pw] : m.factors)
            if (a.kind == Atom::Kind::FApply) {
                collect_f_atoms(*a.arg, out);
                out.push_back(a);
            }
}

inline std::vector<Atom> f_atoms_innermost_first(const Poly& p) {
    std::vector<Atom> all;
    collect_f_atoms(p, all);
    std::stable_sort(all.begin(), all.end(),
                     [](const Atom& x, const Atom& y) { return depth(x) < depth(y); });
    // Deduplicate structurally equal atoms, keeping first occurrence.
    std::vector<Atom> out;
    for (const auto& a : all) {
        bool seen = false;
        for (const auto& b : out)
            if (cmp(a, b) == 0) { seen = true; break; }
        if (!seen) out.push_back(a);
    }
    return out;
}

// Replaces every occurrence of the given f-atom (also inside nested
// arguments) by a polynomial value, renormalizing on the way out.
inline Poly replace_atom(const Poly& p, const Atom& target, const Poly& value) {
    Poly out;
    for (const auto& [m, c] : p.terms()) {
        Poly term = Poly::constant(c);
        for (const auto& [a, pw] : m.factors) {
            Poly factor;
            if (a.kind == Atom::Kind::FApply) {
                Poly arg = replace_atom(*a.arg, target, value);
                Atom rebuilt = Atom::fapply(std::make_shared<const Poly>(arg));
                factor = cmp(rebuilt, target) == 0 ? value : Poly::from_atom(rebuilt);
            } else {
                factor = cmp(a, target) == 0 ? value : Poly::from_atom(a);
            }
            term = term * factor.pow(pw);
        }
        out += term;
    }
    return out;
}

// ---- division ----

// Division order: graded lex on exponent vectors. Unlike the display order
// above it is multiplicative, which classical multivariate division needs
// for termination.
inline int divcmp(const Monomial& a, const Monomial& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree() ? -1 : 1;
    size_t i = 0, j = 0;
    while (i < a.factors.size() && j < b.factors.size()) {
        int c = cmp(a.factors[i].first, b.factors[j].first);
        // Earlier atom with positive exponent ranks higher.
        if (c < 0) return 1;
        if (c > 0) return -1;
        if (a.factors[i].second != b.factors[j].second)
            return a.factors[i].second > b.factors[j].second ? 1 : -1;
        ++i, ++j;
    }
    if (i < a.factors.size()) return 1;
    if (j < b.factors.size()) return -1;
    return 0;
}

inline std::pair<Monomial, Rational> division_lead(const Poly& p) {
    auto it = p.terms().begin();
    std::pair<Monomial, Rational> best = *it;
    for (++it; it != p.terms().end(); ++it)
        if (divcmp(it->first, best.first) > 0) best = *it;
    return best;
}

// Exact multivariate division: returns q with p = q * d, or nullopt.
inline std::optional<Poly> exact_div(const Poly& p, const Poly& d) {
    if (d.is_zero()) return std::nullopt;
    Poly rem = p;
    Poly q;
    auto dl = division_lead(d);
    while (!rem.is_zero()) {
        auto rl = division_lead(rem);
        auto m = mono_div(rl.first, dl.first);
        if (!m) return std::nullopt;
        Rational c = rl.second / dl.second;
        Poly step = Poly::from_monomial(*m, c);
        q += step;
        rem -= step * d;
        // The division-order lead of rem strictly decreases.
    }
    return q;
}

// Divides out the gcd of all monomials (common atom powers). Returns the
// extracted monomial and the quotient.
inline std::pair<Monomial, Poly> monomial_content(const Poly& p) {
    if (p.is_zero()) return {Monomial{}, p};
    Monomial gcd = p.terms().begin()->first;
    for (const auto& [m, c] : p.terms()) {
        Monomial next;
        size_t i = 0, j = 0;
        while (i < gcd.factors.size() && j < m.factors.size()) {
            int cm = cmp(gcd.factors[i].first, m.factors[j].first);
            if (cm < 0) ++i;
            else if (cm > 0) ++j;
            else {
                next.factors.emplace_back(gcd.factors[i].first,
                                          std::min(gcd.factors[i].second, m.factors[j].second));
                ++i, ++j;
            }
        }
        gcd = std::move(next);
        if (gcd.factors.empty()) break;
    }
    if (gcd.factors.empty()) return {gcd, p};
    Poly out;
    for (const auto& [m, c] : p.terms()) out.add_term(*mono_div(m, gcd), c);
    return {gcd, out};
}

// Rational content: positive scalar k such that p/k has coprime integer
// coefficients; the pair (k, p/k).
inline std::pair<Rational, Poly> rational_content(const Poly& p) {
    if (p.is_zero()) return {Rational(1), p};
    BigInt g = 0, l = 1;
    for (const auto& [m, c] : p.terms()) {
        g = boost::multiprecision::gcd(g, boost::multiprecision::abs(num(c)));
        l = boost::multiprecision::lcm(l, den(c));
    }
    Rational k(g, l);
    return {k, p.scaled(Rational(1) / k)};
}

// Scales so the greatest monomial has coefficient +1: the canonical key
// form used for fact deduplication.
inline Poly monic(const Poly& p) {
    if (p.is_zero()) return p;
    return p.scaled(Rational(1) / p.lead().second);
}

// ---- eval on canonical form ----

inline Rational eval(const Poly& p, const std::map<std::string, Rational>& env, const Witness& w);

inline Rational eval(const Atom& a, const std::map<std::string, Rational>& env, const Witness& w) {
    switch (a.kind) {
        case Atom::Kind::Variable:
        case Atom::Kind::Parameter: {
            auto it = env.find(a.name);
            if (it == env.end()) throw std::invalid_argument("eval: unbound name " + a.name);
            return it->second;
        }
        case Atom::Kind::FApply:
            return w(eval(*a.arg, env, w));
    }
    throw std::logic_error("eval: bad atom");
}

inline Rational eval(const Poly& p, const std::map<std::string, Rational>& env, const Witness& w) {
    Rational acc(0);
    for (const auto& [m, c] : p.terms()) {
        Rational t = c;
        for (const auto& [a, pw] : m.factors) t *= rat_pow(eval(a, env, w), pw);
        acc += t;
    }
    return acc;
}

}  // namespace fe
