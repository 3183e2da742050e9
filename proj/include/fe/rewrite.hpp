#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fe/error.hpp"
#include "fe/fact.hpp"
#include "fe/parse.hpp"

namespace fe {

// ---- instantiate ----------------------------------------------------------

// P(a, b): substitutes binding images for quantified variables, keeps the
// other quantifiers, and records a side condition whenever membership of an
// image in the variable's domain is not syntactically evident (the classic
// case: positivity of x - f(x) over R+).
inline Fact instantiate(const Fact& fact, const Bindings& bindings, const DomainCtx& ctx) {
    for (const auto& [name, image] : bindings)
        if (!fact.domain_of(name))
            throw FeError(FeError::Code::Domain, "instantiate: '" + name + "' is not quantified");

    Fact out;
    out.lhs = substitute(to_expr(fact.lhs), bindings);
    out.rhs = substitute(to_expr(fact.rhs), bindings);

    // Unbound quantifiers survive; fresh variables brought in by images are
    // quantified with the domain of the variable they replace.
    for (const auto& [name, dom] : fact.quantified)
        if (!bindings.count(name)) out.quantified.emplace_back(name, dom);
    for (const auto& [name, image] : bindings) {
        DomainKind dom = *fact.domain_of(name);
        for (const auto& v : free_variables(normalize(image)))
            if (!out.domain_of(v)) out.quantified.emplace_back(v, dom);
    }

    // Domain membership of binding images.
    for (const auto& [name, image] : bindings) {
        DomainKind dom = *fact.domain_of(name);
        Poly ip = normalize(image);
        if (evidently_in_domain(ip, dom, ctx)) continue;
        SideCondition::Kind kind;
        switch (dom) {
            case DomainKind::PositiveReals: kind = SideCondition::Kind::Positive; break;
            case DomainKind::PositiveIntegers:
                kind = evidently_integer(ip, ctx) ? SideCondition::Kind::Positive
                                                  : SideCondition::Kind::NaturalValued;
                break;
            case DomainKind::Integers: kind = SideCondition::Kind::IntegerValued; break;
            default: kind = SideCondition::Kind::Positive; break;
        }
        out.add_condition({kind, ip});
    }

    // Carried side conditions, substituted through.
    for (const auto& sc : fact.side_conditions)
        out.add_condition({sc.kind, substitute(to_expr(sc.expr), bindings)});

    // Tail bounds: a bound on v transfers to the image. Images of the shape
    // u + d (d free of u) rebound u; anything else becomes a recorded
    // positivity condition on image - bound.
    for (const auto& tb : fact.tail_bounds) {
        Poly bound = substitute(to_expr(tb.bound), bindings);
        auto it = bindings.find(tb.var);
        if (it == bindings.end()) {
            out.add_tail({tb.var, bound});
            continue;
        }
        Poly image = normalize(it->second);
        bool rebound = false;
        for (const auto& v : free_variables(image)) {
            Poly shifted = image - Poly::from_atom(Atom::variable(v));
            if (!contains_variable(shifted, v)) {
                out.add_tail({v, bound - shifted});
                rebound = true;
                break;
            }
        }
        if (!rebound) out.add_condition({SideCondition::Kind::Positive, image - bound});
    }

    out.provenance = {"instantiate", {}, {}};
    return out;
}

// ---- subtract -------------------------------------------------------------

// P1 - P2: the coefficient-imbalance workhorse. Tail bounds and side
// conditions are unioned; quantifier domains must agree on shared names.
inline Fact subtract(const Fact& a, const Fact& b) {
    Fact out;
    out.lhs = a.lhs - b.lhs;
    out.rhs = a.rhs - b.rhs;
    out.quantified = a.quantified;
    for (const auto& [name, dom] : b.quantified) {
        auto existing = out.domain_of(name);
        if (!existing) out.quantified.emplace_back(name, dom);
        else if (*existing != dom)
            throw FeError(FeError::Code::Domain,
                          "subtract: incompatible quantifier domains for '" + name + "'");
    }
    for (const auto& t : a.tail_bounds) out.add_tail(t);
    for (const auto& t : b.tail_bounds) out.add_tail(t);
    for (const auto& c : a.side_conditions) out.add_condition(c);
    for (const auto& c : b.side_conditions) out.add_condition(c);
    out.provenance = {"subtract", {}, {}};
    return out;
}

// ---- shift_difference ------------------------------------------------------

// The canonical cde move: P(v + delta, .) - P(v, .).
inline Fact shift_difference(const Fact& fact, const std::string& var, const Expr& delta,
                             const DomainCtx& ctx) {
    Bindings b{{var, Expr::variable(var) + delta}};
    Fact shifted = instantiate(fact, b, ctx);
    Fact out = subtract(shifted, fact);
    out.provenance = {"shift_difference", {}, var + " += " + render(delta)};
    return out;
}

// ---- syntactic matching ----------------------------------------------------

namespace match_detail {

using Binds = std::map<std::string, Poly>;

inline Poly apply_binds(const Poly& p, const Binds& binds) {
    if (binds.empty()) return p;
    Bindings b;
    for (const auto& [k, v] : binds) b[k] = to_expr(v);
    return substitute(to_expr(p), b);
}

inline bool poly_has_mvar(const Poly& p, const std::set<std::string>& mvars) {
    for (const auto& v : free_variables(p))
        if (mvars.count(v)) return true;
    return false;
}

bool match_poly(const Poly& pattern, const Poly& target, const std::set<std::string>& mvars,
                Binds& binds);

// Matching is syntactic on canonical forms: f-atoms align structurally with
// exact coefficients, ground monomials must be present without sign flips,
// and at most one bare match variable absorbs the linear remainder.
inline bool match_rest(const Poly& pattern, const Poly& target, const std::set<std::string>& mvars,
                       Binds& binds) {
    Poly p = apply_binds(pattern, binds);

    // First unresolved structured monomial: an f-atom whose argument still
    // contains match variables, or a match-variable power.
    for (const auto& [m, c] : p.terms()) {
        if (m.factors.size() != 1) continue;
        const auto& [atom, pw] = m.factors[0];
        if (atom.kind == Atom::Kind::FApply && poly_has_mvar(*atom.arg, mvars)) {
            for (const auto& [tm, tc] : target.terms()) {
                if (tc != c || tm.factors.size() != 1) continue;
                const auto& [tatom, tpw] = tm.factors[0];
                if (tatom.kind != Atom::Kind::FApply || tpw != pw) continue;
                Binds saved = binds;
                if (match_poly(*atom.arg, *tatom.arg, mvars, binds)) {
                    Poly rest_p = p;
                    rest_p.add_term(m, -c);
                    Poly rest_t = target;
                    rest_t.add_term(tm, -tc);
                    if (match_rest(rest_p, rest_t, mvars, binds)) return true;
                }
                binds = saved;
            }
            return false;
        }
        if (atom.kind == Atom::Kind::Variable && mvars.count(atom.name) && pw >= 2) {
            for (const auto& [tm, tc] : target.terms()) {
                if (tc != c || tm.factors.size() != 1 || tm.factors[0].second != pw) continue;
                Binds saved = binds;
                binds[atom.name] = Poly::from_atom(tm.factors[0].first);
                Poly rest_p = p;
                rest_p.add_term(m, -c);
                Poly rest_t = target;
                rest_t.add_term(tm, -tc);
                if (match_rest(rest_p, rest_t, mvars, binds)) return true;
                binds = saved;
            }
            return false;
        }
    }

    // No structured monomials left: split into ground part and bare
    // match-variable monomials.
    Poly remaining = target;
    std::optional<std::pair<std::string, Rational>> bare;
    for (const auto& [m, c] : p.terms()) {
        bool is_bare = m.factors.size() == 1 && m.factors[0].second == 1 &&
                       m.factors[0].first.kind == Atom::Kind::Variable &&
                       mvars.count(m.factors[0].first.name) &&
                       !binds.count(m.factors[0].first.name);
        if (is_bare) {
            if (bare) return false;  // two unbound remainder variables: ambiguous
            bare = {m.factors[0].first.name, c};
            continue;
        }
        if (poly_has_mvar(Poly::from_monomial(m, c), mvars)) return false;  // unsupported shape
        Rational have = remaining.coeff(m);
        if (have == 0 || (have > 0) != (c > 0) || rat_abs(have) < rat_abs(c))
            return false;  // ground monomial not literally present
        remaining.add_term(m, -c);
    }
    if (!bare) return remaining.is_zero();
    binds[bare->first] = remaining.scaled(Rational(1) / bare->second);
    return true;
}

inline bool match_poly(const Poly& pattern, const Poly& target, const std::set<std::string>& mvars,
                       Binds& binds) {
    return match_rest(pattern, target, mvars, binds);
}

}  // namespace match_detail

// ---- rewrite_with ----------------------------------------------------------

enum class Direction { LeftToRight, RightToLeft };

namespace rewrite_detail {

inline Fact rename_quantified(const Fact& rule, std::vector<std::string>& fresh_names) {
    Bindings renames;
    Fact out = rule;
    out.quantified.clear();
    int i = 1;
    for (const auto& [name, dom] : rule.quantified) {
        std::string fresh = "$" + std::to_string(i++);
        renames[name] = Expr::variable(fresh);
        out.quantified.emplace_back(fresh, dom);
        fresh_names.push_back(fresh);
    }
    out.lhs = substitute(to_expr(rule.lhs), renames);
    out.rhs = substitute(to_expr(rule.rhs), renames);
    std::vector<TailBound> tails;
    for (const auto& tb : rule.tail_bounds) {
        std::string var = tb.var;
        if (renames.count(var)) var = renames.at(var).node().name;
        tails.push_back({var, substitute(to_expr(tb.bound), renames)});
    }
    out.tail_bounds = tails;
    for (auto& sc : out.side_conditions) sc.expr = substitute(to_expr(sc.expr), renames);
    return out;
}

}  // namespace rewrite_detail

// Uses `rule` as a rewrite rule: its chosen side (which must canonically be
// a single f-term) is matched against f-subterms of `target`, innermost
// first, left side before right; the first match is replaced by the
// instantiated other side. Tail bounds and side conditions of the rule
// instance are added to the target's.
inline std::optional<Fact> try_rewrite_with(const Fact& rule, const Fact& target, Direction dir,
                                            const DomainCtx& ctx) {
    std::vector<std::string> fresh;
    Fact r = rewrite_detail::rename_quantified(rule, fresh);
    const Poly& pattern_side = dir == Direction::LeftToRight ? r.lhs : r.rhs;
    const Poly& value_side = dir == Direction::LeftToRight ? r.rhs : r.lhs;

    // Pattern side must be a single f-application with coefficient 1.
    if (pattern_side.size() != 1) return std::nullopt;
    const auto& [pm, pc] = *pattern_side.terms().begin();
    if (pc != 1 || pm.factors.size() != 1 || pm.factors[0].second != 1 ||
        pm.factors[0].first.kind != Atom::Kind::FApply)
        return std::nullopt;
    const Poly& pattern_arg = *pm.factors[0].first.arg;

    std::set<std::string> mvars(fresh.begin(), fresh.end());
    std::set<std::string> value_vars = free_variables(value_side);

    // Candidate positions: every f-atom of the target, innermost first,
    // lhs before rhs.
    std::vector<Atom> positions = f_atoms_innermost_first(target.lhs);
    for (const auto& a : f_atoms_innermost_first(target.rhs)) {
        bool seen = false;
        for (const auto& b : positions)
            if (cmp(a, b) == 0) { seen = true; break; }
        if (!seen) positions.push_back(a);
    }

    for (const auto& pos : positions) {
        match_detail::Binds binds;
        if (!match_detail::match_poly(pattern_arg, *pos.arg, mvars, binds)) continue;
        // Every rule variable used by the replacement must have been bound.
        bool complete = true;
        for (const auto& v : value_vars)
            if (mvars.count(v) && !binds.count(v)) { complete = false; break; }
        if (!complete) continue;
        // Unbound leftover rule variables elsewhere make the instance
        // under-determined; require a full binding.
        if (binds.size() != mvars.size()) continue;

        Bindings inst;
        for (const auto& [k, v] : binds) inst[k] = to_expr(v);
        Fact rule_inst = instantiate(r, inst, ctx);
        const Poly& value = dir == Direction::LeftToRight ? rule_inst.rhs : rule_inst.lhs;

        Fact out;
        out.lhs = replace_atom(target.lhs, pos, value);
        out.rhs = replace_atom(target.rhs, pos, value);
        out.quantified = target.quantified;
        out.tail_bounds = target.tail_bounds;
        out.side_conditions = target.side_conditions;
        for (const auto& t : rule_inst.tail_bounds) out.add_tail(t);
        for (const auto& c : rule_inst.side_conditions) out.add_condition(c);
        out.provenance = {"rewrite_with", {}, "at " + render(Poly::from_atom(pos))};
        return out;
    }
    return std::nullopt;
}

inline Fact rewrite_with(const Fact& rule, const Fact& target, Direction dir,
                         const DomainCtx& ctx) {
    auto out = try_rewrite_with(rule, target, dir, ctx);
    if (!out) throw FeError(FeError::Code::NoMatch, "rewrite_with: no matching subterm");
    return *out;
}

// ---- shift-fact helpers ----------------------------------------------------

// A ShiftFact as a plain quantified fact f(t + c) = f(t) + d over a fresh
// base variable, its parameters re-quantified.
inline Fact shift_to_fact(const ShiftFact& s, DomainKind domain, const std::string& base = "t") {
    Fact out;
    Poly t = Poly::from_atom(Atom::variable(base));
    Poly arg = t + s.shift;
    out.lhs = Poly::from_atom(Atom::fapply(std::make_shared<const Poly>(arg)));
    out.rhs = Poly::from_atom(Atom::fapply(std::make_shared<const Poly>(t))) + s.delta;
    out.quantified.emplace_back(base, domain);
    for (const auto& p : s.parameters) out.quantified.emplace_back(p, domain);
    if (s.tail) out.add_tail({base, *s.tail});
    out.provenance = {"shift_fact", {}, {}};
    return out;
}

// Extension of a ground shift to natural multiples: replaces an f-term
// f(R + q*c) by f(R) + q*d when the quotient q is evidently a natural
// number and the peeled remainder stays evidently in domain. Division is
// sign-safe: q*c must be literally contained in the argument.
inline std::optional<Fact> try_shift_peel(const Fact& target, const ShiftFact& s,
                                          DomainKind domain, const DomainCtx& ctx) {
    if (!s.parameters.empty()) return std::nullopt;  // parametric shifts go through rewrite_with
    if (s.shift.is_zero()) return std::nullopt;

    std::vector<Atom> positions = f_atoms_innermost_first(target.lhs);
    for (const auto& a : f_atoms_innermost_first(target.rhs)) {
        bool seen = false;
        for (const auto& b : positions)
            if (cmp(a, b) == 0) { seen = true; break; }
        if (!seen) positions.push_back(a);
    }

    for (const auto& pos : positions) {
        const Poly& G = *pos.arg;
        // Classical division of G by the shift constant: monomials not
        // divisible by the division-order lead drop into the remainder.
        Poly q, rem = G, done;
        auto lead = division_lead(s.shift);
        while (!rem.is_zero()) {
            auto rl = division_lead(rem);
            auto dm = mono_div(rl.first, lead.first);
            if (!dm) {
                done.add_term(rl.first, rl.second);
                rem.add_term(rl.first, -rl.second);
                continue;
            }
            Poly sp = Poly::from_monomial(*dm, rl.second / lead.second);
            q += sp;
            rem -= sp * s.shift;
        }
        rem = done;
        if (q.is_zero()) continue;
        // The extension is only valid for natural repetition counts.
        if (!evidently_nonneg_integer(q, ctx)) continue;
        // Sign safety: q*c literally contained in G.
        Poly qc = q * s.shift;
        bool safe = true;
        for (const auto& [m, c] : qc.terms()) {
            Rational have = G.coeff(m);
            if (have == 0 || (have > 0) != (c > 0) || rat_abs(have) < rat_abs(c)) {
                safe = false;
                break;
            }
        }
        if (!safe) continue;
        // Remainder must evidently stay in the domain (no side conditions
        // from engine peels).
        if (!evidently_in_domain(rem, domain, ctx)) continue;

        Poly value = Poly::from_atom(Atom::fapply(std::make_shared<const Poly>(rem))) +
                     q * s.delta;
        Fact out;
        out.lhs = replace_atom(target.lhs, pos, value);
        out.rhs = replace_atom(target.rhs, pos, value);
        out.quantified = target.quantified;
        out.tail_bounds = target.tail_bounds;
        out.side_conditions = target.side_conditions;
        out.provenance = {"shift_peel", {}, "q = " + render(q)};
        return out;
    }
    return std::nullopt;
}

// f(k*X) = k*f(X) applied left to right: divides an f-argument with all
// integer coefficients divisible by k. Only fires when it strictly reduces
// the coefficient content, so repeated application terminates.
inline std::optional<Fact> try_homogeneity_rewrite(const Fact& target, const Rational& k) {
    if (k == 0 || k == 1 || !is_integer(k)) return std::nullopt;
    std::vector<Atom> positions = f_atoms_innermost_first(target.lhs);
    for (const auto& a : f_atoms_innermost_first(target.rhs)) positions.push_back(a);

    for (const auto& pos : positions) {
        const Poly& G = *pos.arg;
        if (G.is_zero()) continue;
        bool divisible = true;
        for (const auto& [m, c] : G.terms())
            if (!is_integer(c) || num(c) % num(k) != 0) { divisible = false; break; }
        if (!divisible) continue;
        Poly inner = G.scaled(Rational(1) / k);
        Poly value =
            Poly::from_atom(Atom::fapply(std::make_shared<const Poly>(inner))).scaled(k);
        Fact out;
        out.lhs = replace_atom(target.lhs, pos, value);
        out.rhs = replace_atom(target.rhs, pos, value);
        out.quantified = target.quantified;
        out.tail_bounds = target.tail_bounds;
        out.side_conditions = target.side_conditions;
        out.provenance = {"homogeneity", {}, "k = " + rat_str(k)};
        return out;
    }
    return std::nullopt;
}

}  // namespace fe
