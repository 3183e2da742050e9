#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fe/family.hpp"
#include "fe/rewrite.hpp"

namespace fe {

// Deterministic supply of fresh parameter names (s1, t2, M3, ...) that
// avoids a caller-provided used set.
struct FreshNames {
    std::set<std::string> used;
    int counter = 0;

    std::string next(const std::string& base) {
        while (true) {
            std::string name = base + std::to_string(++counter);
            if (used.insert(name).second) return name;
        }
    }
};

namespace lemma_detail {

// Top-level f-monomials of a polynomial: single-factor, power-1 entries
// (atom argument, coefficient).
inline std::vector<std::pair<Poly, Rational>> top_f_monomials(const Poly& p) {
    std::vector<std::pair<Poly, Rational>> out;
    for (const auto& [m, c] : p.terms())
        if (m.factors.size() == 1 && m.factors[0].second == 1 &&
            m.factors[0].first.kind == Atom::Kind::FApply)
            out.emplace_back(*m.factors[0].first.arg, c);
    return out;
}

inline bool is_bare_var(const Poly& p, const std::string& name) {
    return p == Poly::from_atom(Atom::variable(name));
}

inline Poly fapp(const Poly& arg) {
    return Poly::from_atom(Atom::fapply(std::make_shared<const Poly>(arg)));
}

inline bool ground_for(const Fact& f, const Poly& p) {
    auto vars = free_variables(p);
    for (const auto& [n, d] : f.quantified)
        if (vars.count(n)) return false;
    return true;
}

}  // namespace lemma_detail

// ---- iteration lemma --------------------------------------------------------

// f(f(X) + S1) = X + S2 with S1, S2 free of X gives the cde relation with
// c = d = S1 + S2; other quantified variables survive as shift parameters.
inline std::optional<ShiftFact> iteration_lemma(const Fact& fact) {
    using namespace lemma_detail;
    for (int orient = 0; orient < 2; ++orient) {
        const Poly& L = orient ? fact.rhs : fact.lhs;
        const Poly& R = orient ? fact.lhs : fact.rhs;
        if (L.size() != 1) continue;
        const auto& [lm, lc] = *L.terms().begin();
        if (lc != 1 || lm.factors.size() != 1 || lm.factors[0].second != 1 ||
            lm.factors[0].first.kind != Atom::Kind::FApply)
            continue;
        const Poly& arg = *lm.factors[0].first.arg;
        for (const auto& [x, dom] : fact.quantified) {
            Poly bare_x = Poly::from_atom(Atom::variable(x));
            if (R.coeff(Monomial{{{Atom::variable(x), 1}}}) != 1) continue;
            Poly s2 = R - bare_x;
            if (contains_variable(s2, x)) continue;
            Poly fx = fapp(bare_x);
            if (arg.coeff(fx.terms().begin()->first) != 1) continue;
            Poly s1 = arg - fx;
            if (contains_variable(s1, x)) continue;

            ShiftFact s;
            s.shift = s1 + s2;
            s.delta = s.shift;
            if (s.shift.is_zero()) continue;
            for (const auto& [v, d] : fact.quantified)
                if (v != x && contains_variable(s.shift, v)) s.parameters.push_back(v);
            return s;
        }
    }
    return std::nullopt;
}

// ---- direct cde shape --------------------------------------------------------

// f(X + c) = f(X) + d, c and d free of X; d may carry further quantified
// variables or ground f-terms, which become shift parameters.
inline std::optional<ShiftFact> cde_scan(const Fact& fact) {
    using namespace lemma_detail;
    Poly D = fact.diff();
    auto fs = top_f_monomials(D);
    for (size_t i = 0; i < fs.size(); ++i)
        for (size_t j = 0; j < fs.size(); ++j) {
            if (i == j) continue;
            const auto& [argA, cA] = fs[i];
            const auto& [argB, cB] = fs[j];
            if (cA != -cB) continue;
            for (const auto& [x, dom] : fact.quantified) {
                if (!is_bare_var(argB, x)) continue;
                Poly c = argA - argB;
                if (c.is_zero() || contains_variable(c, x)) continue;
                // cA*f(X+c) + cB*f(X) + rest = 0  =>  d = -rest/cA.
                Poly rest = D - fapp(argA).scaled(cA) - fapp(argB).scaled(cB);
                Poly d = rest.scaled(Rational(-1) / cA);
                if (contains_variable(d, x)) continue;

                ShiftFact s;
                s.shift = c;
                s.delta = d;
                for (const auto& [v, vd] : fact.quantified)
                    if (v != x && (contains_variable(c, v) || contains_variable(d, v)))
                        s.parameters.push_back(v);
                for (const auto& tb : fact.tail_bounds)
                    if (tb.var == x) s.tail = tb.bound;
                return s;
            }
        }
    return std::nullopt;
}

// ---- shift extension ---------------------------------------------------------

// f(x+c) = f(x)+d extends to f(x+Nc) = f(x)+Nd for natural N.
inline ShiftFact extend_shift(const ShiftFact& s, int n) {
    if (n < 1) throw FeError(FeError::Code::Domain, "extend_shift: N must be >= 1");
    ShiftFact out = s;
    out.shift = s.shift.scaled(Rational(n));
    out.delta = s.delta.scaled(Rational(n));
    return out;
}

// ---- Cauchy-type lemma -------------------------------------------------------

struct CtlResult {
    std::vector<ShiftFact> shifts;  // intermediate relations from the proof
    Fact additive;                  // f(X+Y) = f(X) + f(Y) + w'' above the tail
    Poly w2;                        // the additive constant w''
    std::string tail_param;
};

// f(X+Y) = f(X+u) + f(Y+v) + w for constants u, v, w and sufficiently
// large X, Y. The proof subtracts the mirrored instance to get
// f(x+u) = f(x+v) + s (skipped when u = v), then the v-shifted difference
// for f(x+v) = f(x) + t, leaving f additive plus w'' = w + s + 2t.
inline std::optional<CtlResult> ctl(const Fact& fact, FreshNames& fresh) {
    using namespace lemma_detail;
    if (fact.quantified.size() < 2) return std::nullopt;
    Poly D = fact.diff();
    auto fs = top_f_monomials(D);

    for (size_t si = 0; si < fs.size(); ++si) {
        const auto& [S, cS] = fs[si];
        std::vector<size_t> rest_idx;
        for (size_t j = 0; j < fs.size(); ++j)
            if (j != si && fs[j].second == -cS) rest_idx.push_back(j);
        if (rest_idx.size() < 2) continue;

        for (size_t xi = 0; xi < fact.quantified.size(); ++xi)
            for (size_t yi = 0; yi < fact.quantified.size(); ++yi) {
                if (xi == yi) continue;
                const std::string& X = fact.quantified[xi].first;
                const std::string& Y = fact.quantified[yi].first;
                Poly bx = Poly::from_atom(Atom::variable(X));
                Poly by = Poly::from_atom(Atom::variable(Y));
                if (S != bx + by) continue;
                for (size_t pi = 0; pi < rest_idx.size(); ++pi)
                for (size_t qi = 0; qi < rest_idx.size(); ++qi) {
                    if (pi == qi) continue;
                    const Poly& P = fs[rest_idx[pi]].first;
                    const Poly& Q = fs[rest_idx[qi]].first;
                    Poly u = P - bx;
                    Poly v = Q - by;
                    if (contains_variable(u, X) || contains_variable(u, Y)) continue;
                    if (contains_variable(v, X) || contains_variable(v, Y)) continue;
                    Poly rest = D;
                    rest -= fapp(S).scaled(cS);
                    rest -= fapp(P).scaled(-cS);
                    rest -= fapp(Q).scaled(-cS);
                    // D = cS*(f(S) - f(P) - f(Q)) + rest = 0 gives w = -rest/cS.
                    Poly w = rest.scaled(Rational(-1) / cS);
                    if (contains_variable(w, X) || contains_variable(w, Y)) continue;

                    CtlResult out;
                    std::string M = fresh.next("M");
                    out.tail_param = M;
                    Poly tailp = Poly::from_atom(Atom::parameter(M));

                    Poly s_const = Poly::zero();
                    if (u != v) {
                        std::string s = fresh.next("s");
                        s_const = Poly::from_atom(Atom::parameter(s));
                        ShiftFact sf;
                        sf.shift = u - v;
                        sf.delta = s_const;
                        sf.tail = tailp;
                        out.shifts.push_back(sf);
                    }
                    Poly t_const = Poly::zero();
                    if (!v.is_zero()) {
                        std::string t = fresh.next("t");
                        t_const = Poly::from_atom(Atom::parameter(t));
                        ShiftFact tf;
                        tf.shift = v;
                        tf.delta = t_const;
                        tf.tail = tailp;
                        out.shifts.push_back(tf);
                    }
                    out.w2 = w + s_const + t_const.scaled(Rational(2));

                    DomainKind dom = fact.quantified[xi].second;
                    Fact add;
                    add.lhs = fapp(bx + by);
                    add.rhs = fapp(bx) + fapp(by) + out.w2;
                    add.quantified = {{X, dom}, {Y, dom}};
                    add.add_tail({X, tailp});
                    add.add_tail({Y, tailp});
                    add.side_conditions = fact.side_conditions;
                    add.provenance = {"ctl", {}, "w'' = " + render(out.w2)};
                    out.additive = add;
                    return out;
                }
            }
    }
    return std::nullopt;
}

// ---- Jensen ------------------------------------------------------------------

// (f(X)+f(Y))/2 = f((X+Y)/2) in any scaled form: two f-terms with equal
// coefficients against a double-weight midpoint term. Produces the affine
// family; over the positive reals nonnegative a, b, not both zero.
inline std::optional<CandidateFamily> jensen(const Fact& fact, FreshNames& fresh,
                                             DomainKind codomain) {
    using namespace lemma_detail;
    Poly D = fact.diff();
    auto fs = top_f_monomials(D);
    if (fs.size() != 3) return std::nullopt;
    // Residue apart from the three f-terms must vanish.
    Poly rest = D;
    for (const auto& [a, c] : fs) rest -= fapp(a).scaled(c);
    if (!rest.is_zero()) return std::nullopt;

    for (size_t mi = 0; mi < 3; ++mi) {
        const auto& [mid, cm] = fs[mi];
        std::vector<size_t> others;
        for (size_t j = 0; j < 3; ++j)
            if (j != mi) others.push_back(j);
        const auto& [a1, c1] = fs[others[0]];
        const auto& [a2, c2] = fs[others[1]];
        if (c1 != c2 || cm != -c1 * 2) continue;
        if (a1 + a2 != mid.scaled(Rational(2))) continue;
        if (ground_for(fact, a1) || ground_for(fact, a2)) continue;

        CandidateFamily fam =
            CandidateFamily::affine(Poly::from_atom(Atom::parameter(fresh.next("a"))),
                                    Poly::from_atom(Atom::parameter(fresh.next("b"))));
        if (!fact.tail_bounds.empty()) {
            fam.validity = CandidateFamily::Validity::AboveTail;
            fam.tail = fact.tail_bounds.front().bound;
        }
        if (codomain == DomainKind::PositiveReals)
            fam.sign_notes = {fam.params[0] + " >= 0", fam.params[1] + " >= 0",
                              "not both 0"};
        return fam;
    }
    return std::nullopt;
}

// ---- bounded additive => linear ---------------------------------------------

// From f(X+Y) = f(X)+f(Y)+w: over Q, additive maps are linear, so
// f(t) = c*t - w on the whole domain; over R+ the shifted map is Cauchy and
// lower-bounded, so f(t) = c*t - w above a tail. Other codomains no-match.
inline std::optional<std::pair<Poly, Poly>> additive_scan(const Fact& fact) {
    using namespace lemma_detail;
    Poly D = fact.diff();
    auto fs = top_f_monomials(D);
    for (size_t si = 0; si < fs.size(); ++si) {
        const auto& [S, cS] = fs[si];
        for (size_t j = 0; j < fs.size(); ++j)
            for (size_t l = j + 1; l < fs.size(); ++l) {
                if (j == si || l == si) continue;
                if (fs[j].second != -cS || fs[l].second != -cS) continue;
                const Poly& U = fs[j].first;
                const Poly& V = fs[l].first;
                if (S != U + V) continue;
                if (ground_for(fact, U) || ground_for(fact, V)) continue;
                Poly rest = D;
                rest -= fapp(S).scaled(cS);
                rest -= fapp(U).scaled(-cS);
                rest -= fapp(V).scaled(-cS);
                Poly w = rest.scaled(Rational(-1) / cS);
                if (!ground_for(fact, w)) continue;
                return std::make_pair(U + V, w);  // f(U+V) = f(U)+f(V)+w
            }
    }
    return std::nullopt;
}

inline std::optional<CandidateFamily> bounded_additive_linear(const Fact& fact,
                                                              DomainKind codomain,
                                                              FreshNames& fresh) {
    auto add = additive_scan(fact);
    if (!add) return std::nullopt;
    if (codomain != DomainKind::Rationals && codomain != DomainKind::PositiveReals)
        return std::nullopt;
    const Poly& w = add->second;

    CandidateFamily fam = CandidateFamily::affine(
        Poly::from_atom(Atom::parameter(fresh.next("c"))), w.scaled(Rational(-1)));
    if (codomain == DomainKind::PositiveReals) {
        fam.validity = CandidateFamily::Validity::AboveTail;
        fam.tail = fact.tail_bounds.empty() ? Poly::from_atom(Atom::parameter(fresh.next("M")))
                                            : fact.tail_bounds.front().bound;
        fam.sign_notes = {fam.params[0] + " >= 0"};
    }
    fam.finish_params();
    return fam;
}

// ---- composition lemma -------------------------------------------------------

// From f(G(X)) = H(X) with f injective and H affine with nonzero slope: the
// inner expression is injective, and for positive slope surjective onto a
// tail of the domain.
inline std::optional<std::vector<PropertyFact>> composition_lemma(const Fact& eq,
                                                                  const PropertyFact& known,
                                                                  FreshNames& fresh) {
    using namespace lemma_detail;
    if (known.kind != PropertyFact::Kind::Injective) return std::nullopt;
    for (int orient = 0; orient < 2; ++orient) {
        const Poly& L = orient ? eq.rhs : eq.lhs;
        const Poly& H = orient ? eq.lhs : eq.rhs;
        if (L.size() != 1 || contains_f(H)) continue;
        const auto& [lm, lc] = *L.terms().begin();
        if (lc != 1 || lm.factors.size() != 1 || lm.factors[0].second != 1 ||
            lm.factors[0].first.kind != Atom::Kind::FApply)
            continue;
        const Poly& G = *lm.factors[0].first.arg;
        for (const auto& [x, dom] : eq.quantified) {
            if (!contains_variable(G, x) || !contains_variable(H, x)) continue;
            // H must be affine in x with nonzero slope.
            Poly slope = Poly::zero();
            Poly rest = Poly::zero();
            bool affine = true;
            Monomial bare{{{Atom::variable(x), 1}}};
            for (const auto& [m, c] : H.terms()) {
                if (cmp(m, bare) == 0) { slope = Poly::constant(c); continue; }
                Poly piece = Poly::from_monomial(m, c);
                if (contains_variable(piece, x)) {
                    affine = false;
                    break;
                }
                rest += piece;
            }
            auto sc = slope.as_constant();
            if (!affine || !sc || *sc == 0) continue;

            std::vector<PropertyFact> out;
            PropertyFact inj;
            inj.kind = PropertyFact::Kind::Injective;
            inj.subject = G;
            inj.subject_var = x;
            inj.provenance = {"composition_lemma", {}, {}};
            out.push_back(inj);
            if (*sc > 0) {
                PropertyFact sur;
                sur.kind = PropertyFact::Kind::SurjectiveOntoTail;
                sur.subject = G;
                sur.subject_var = x;
                sur.bound = Poly::from_atom(Atom::parameter(fresh.next("M")));
                sur.provenance = {"composition_lemma", {}, {}};
                out.push_back(sur);
            }
            return out;
        }
    }
    return std::nullopt;
}

// ---- k-fold iteration --------------------------------------------------------

// Over Z or N*: f(X + A(Y)) = f(X) + B(Y) with A, B free of X iterates to
// f(X + k*A(Y)) = f(X) + k*B(Y) for every natural k (re-instantiating
// X -> X + A(Y) inductively).
inline std::optional<ParamShiftFact> kfold_iteration(const Fact& fact, DomainKind domain,
                                                     FreshNames& fresh) {
    using namespace lemma_detail;
    if (!domain_is_integer(domain)) return std::nullopt;
    Poly D = fact.diff();
    auto fs = top_f_monomials(D);
    for (size_t i = 0; i < fs.size(); ++i)
        for (size_t j = 0; j < fs.size(); ++j) {
            if (i == j) continue;
            const auto& [argA, cA] = fs[i];
            const auto& [argB, cB] = fs[j];
            if (cA != -cB) continue;
            for (const auto& [x, domx] : fact.quantified) {
                if (!is_bare_var(argB, x)) continue;
                Poly A = argA - argB;
                if (A.is_zero() || contains_variable(A, x)) continue;
                Poly rest = D - fapp(argA).scaled(cA) - fapp(argB).scaled(cB);
                Poly B = rest.scaled(Rational(-1) / cA);
                if (B.is_zero() || contains_variable(B, x)) continue;
                // Exactly one parameter variable.
                std::set<std::string> vars = free_variables(A);
                for (const auto& v : free_variables(B)) vars.insert(v);
                if (vars.size() != 1) continue;
                ParamShiftFact p;
                p.a_expr = A;
                p.b_expr = B;
                p.base_var = x;
                p.param_var = *vars.begin();
                p.k_symbol = fresh.next("k");
                return p;
            }
        }
    return std::nullopt;
}

// ---- cross-instantiation swap ------------------------------------------------

// T(x, y, A(z)) against T(x, z, A(y)) evaluates f(x + A(y)A(z)) two ways;
// subtracting cancels f and leaves B(Y)A(Z) = B(Z)A(Y). Naturality of the
// instantiated k is recorded, not proved.
inline Fact cross_swap(const ParamShiftFact& p, DomainKind domain, const DomainCtx& ctx) {
    const std::string& y = p.param_var;
    std::string z = y == "z" ? "z2" : "z";
    Bindings rename{{y, Expr::variable(z)}};
    Poly Az = substitute(to_expr(p.a_expr), rename);
    Poly Bz = substitute(to_expr(p.b_expr), rename);

    Fact out;
    out.lhs = p.b_expr * Az;
    out.rhs = Bz * p.a_expr;
    out.quantified = {{y, domain}, {z, domain}};
    if (!evidently_nonneg_integer(p.a_expr, ctx))
        out.add_condition({SideCondition::Kind::NaturalValued, p.a_expr});
    out.provenance = {"cross_swap", {}, p.k_symbol + " -> A"};
    return out;
}

// ---- scans used for extraction ------------------------------------------------

// f(g) = v with both sides ground: a point value usable as a rewrite rule.
inline std::optional<PropertyFact> point_scan(const Fact& fact) {
    using namespace lemma_detail;
    Poly D = fact.diff();
    if (D.is_zero() || !ground_for(fact, D)) return std::nullopt;
    auto fs = top_f_monomials(D);
    if (fs.size() != 1) return std::nullopt;
    const auto& [g, k] = fs[0];
    Poly rest = D - fapp(g).scaled(k);
    if (contains_f(rest)) return std::nullopt;
    PropertyFact p = PropertyFact::point_value(g, rest.scaled(Rational(-1) / k));
    p.provenance = {"point_scan", {}, {}};
    return p;
}

// f(k*X) = k*f(X) for a rational constant k != 0, 1.
inline std::optional<Rational> homogeneity_scan(const Fact& fact) {
    using namespace lemma_detail;
    Poly D = fact.diff();
    auto fs = top_f_monomials(D);
    if (fs.size() != 2) return std::nullopt;
    Poly rest = D - fapp(fs[0].first).scaled(fs[0].second) - fapp(fs[1].first).scaled(fs[1].second);
    if (!rest.is_zero()) return std::nullopt;
    for (int i = 0; i < 2; ++i) {
        const auto& [scaled_arg, c1] = fs[i];
        const auto& [plain_arg, c2] = fs[1 - i];
        for (const auto& [x, dom] : fact.quantified) {
            if (!is_bare_var(plain_arg, x)) continue;
            Poly bx = Poly::from_atom(Atom::variable(x));
            // scaled_arg = k * x?
            if (scaled_arg.size() != 1) continue;
            const auto& [sm, sc] = *scaled_arg.terms().begin();
            if (cmp(sm, Monomial{{{Atom::variable(x), 1}}}) != 0) continue;
            Rational k = sc;
            if (k == 0 || k == 1) continue;
            // Coefficients must satisfy c1*f(kx) + c2*f(x) = 0 with c2 = -k*c1.
            if (c2 != -k * c1) continue;
            return k;
        }
    }
    return std::nullopt;
}

// Y*f(Z) = Z*f(Y) (after removing monomial content) proposes the linear
// family: the ratio f(t)/t is constant wherever it is defined.
inline std::optional<CandidateFamily> proportionality_scan(const Fact& fact, FreshNames& fresh) {
    if (fact.quantified.size() < 2) return std::nullopt;
    Poly D = monomial_content(fact.diff()).second;
    if (D.size() != 2) return std::nullopt;
    auto it = D.terms().begin();
    auto [m1, c1] = *it;
    ++it;
    auto [m2, c2] = *it;
    if (c1 != -c2) return std::nullopt;
    auto decompose = [&](const Monomial& m) -> std::optional<std::pair<std::string, Poly>> {
        if (m.factors.size() != 2) return std::nullopt;
        const Atom* var = nullptr;
        const Atom* f = nullptr;
        for (const auto& [a, p] : m.factors) {
            if (p != 1) return std::nullopt;
            if (a.kind == Atom::Kind::Variable) var = &a;
            if (a.kind == Atom::Kind::FApply) f = &a;
        }
        if (!var || !f) return std::nullopt;
        return std::make_pair(var->name, *f->arg);
    };
    auto d1 = decompose(m1);
    auto d2 = decompose(m2);
    if (!d1 || !d2) return std::nullopt;
    // y*f(z) against z*f(y), both quantified.
    if (!lemma_detail::is_bare_var(d1->second, d2->first) ||
        !lemma_detail::is_bare_var(d2->second, d1->first))
        return std::nullopt;
    if (!fact.domain_of(d1->first) || !fact.domain_of(d2->first)) return std::nullopt;
    return CandidateFamily::linear(Poly::from_atom(Atom::parameter(fresh.next("a"))));
}

// f(X) = polynomial(X): a fully explicit closed form; coefficients that are
// not rational constants become fresh parameters for the verifier to pin.
inline std::optional<CandidateFamily> extract_solved_form(const Fact& fact, FreshNames& fresh) {
    using namespace lemma_detail;
    Poly D = fact.diff();
    // Exactly one non-ground f-term; ground f-terms count as constants.
    std::vector<std::pair<Poly, Rational>> structural;
    for (const auto& [a, c] : top_f_monomials(D))
        if (!ground_for(fact, a)) structural.emplace_back(a, c);
    if (structural.size() != 1) return std::nullopt;
    const auto& [arg, k] = structural[0];
    std::string x;
    for (const auto& [v, d] : fact.quantified)
        if (is_bare_var(arg, v)) x = v;
    if (x.empty()) return std::nullopt;
    Poly rest = (D - fapp(arg).scaled(k)).scaled(Rational(-1) / k);
    if (contains_f(rest)) {
        // Ground f-terms may appear as unknown constants; anything with a
        // quantified variable under f is out.
        for (const auto& [m, c] : rest.terms())
            for (const auto& [a, pw] : m.factors)
                if (a.kind == Atom::Kind::FApply && !ground_for(fact, Poly::from_atom(a)))
                    return std::nullopt;
    }

    std::vector<Poly> coeffs(CandidateFamily::kMaxDegree + 1, Poly::zero());
    Atom xa = Atom::variable(x);
    for (const auto& [m, c] : rest.terms()) {
        int deg = 0;
        Monomial others;
        for (const auto& [a, p] : m.factors) {
            if (cmp(a, xa) == 0) deg = p;
            else others.factors.emplace_back(a, p);
        }
        if (deg > CandidateFamily::kMaxDegree) return std::nullopt;
        Poly piece = Poly::from_monomial(others, c);
        if (contains_variable(piece, x)) return std::nullopt;
        for (const auto& [v, d] : fact.quantified)
            if (contains_variable(piece, v)) return std::nullopt;
        coeffs[deg] += piece;
    }
    // Replace non-rational coefficient expressions by fresh parameters.
    CandidateFamily fam;
    fam.poly_coeffs.clear();
    for (auto& c : coeffs) {
        if (c.as_constant()) fam.poly_coeffs.push_back(c);
        else fam.poly_coeffs.push_back(Poly::from_atom(Atom::parameter(fresh.next("b"))));
    }
    fam.finish_params();
    return fam;
}

}  // namespace fe
