#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fe/lemmas.hpp"
#include "fe/parse.hpp"

namespace fe {

// ---- constraint sets ---------------------------------------------------------

// The outcome of substituting a candidate family into an equation: one
// polynomial constraint over the parameters per monomial in the quantified
// variables, solved into assignment branches and residual conditions.
struct ConstraintSet {
    CandidateFamily family;
    DomainKind domain = DomainKind::Reals;
    DomainKind codomain = DomainKind::Reals;

    std::vector<Poly> constraints;            // canonical, deduped, unsolved
    std::vector<SideCondition> conditions;    // cleared denominators etc.

    enum class Status { Unsolved, Satisfiable, Residual, Unsatisfiable };
    Status status = Status::Unsolved;

    struct Branch {
        std::map<std::string, Rational> assignment;
        std::vector<Poly> residual;
    };
    std::vector<Branch> branches;             // surviving branches after solving
    std::vector<std::string> rejected;        // filtered branches, for the record

    static std::string status_str(Status s) {
        switch (s) {
            case Status::Unsolved: return "unsolved";
            case Status::Satisfiable: return "satisfiable";
            case Status::Residual: return "residual";
            case Status::Unsatisfiable: return "unsatisfiable";
        }
        return {};
    }

    // "c^2 = 2017" style rendering: positive terms left, negated negative
    // terms right.
    static std::string equation_str(const Poly& p) {
        Poly pos, neg;
        for (const auto& [m, c] : p.terms()) {
            if (c > 0) pos.add_term(m, c);
            else neg.add_term(m, -c);
        }
        if (pos.is_zero()) return render(neg) + " = 0";
        return render(pos) + " = " + render(neg);
    }

    std::string str() const {
        std::string out = family.str() + "\n";
        out += "  constraints:";
        if (constraints.empty()) out += " (none)";
        out += "\n";
        for (const auto& c : constraints) out += "    " + equation_str(c) + "\n";
        for (const auto& sc : conditions) out += "  requires: " + sc.str() + "\n";
        if (status == Status::Unsolved) return out;
        out += "  status: " + status_str(status) + "\n";
        for (const auto& b : branches) {
            out += "   ";
            if (b.assignment.empty() && b.residual.empty()) out += " any parameter values";
            for (const auto& [p, v] : b.assignment) out += " " + p + " = " + rat_str(v);
            for (const auto& r : b.residual) out += " [" + equation_str(r) + "]";
            out += "\n";
        }
        for (const auto& r : rejected) out += "    rejected: " + r + "\n";
        return out;
    }
};

// ---- candidate substitution --------------------------------------------------

namespace verify_detail {

// Formal fraction of canonical polynomials. Denominators are never reduced
// against numerators; equality checks cross-multiply, which is sound over
// the infinite domains in play.
struct RatFunc {
    Poly num;
    Poly den;  // nonzero polynomial

    static RatFunc whole(Poly p) { return {std::move(p), Poly::constant(Rational(1))}; }
};

inline RatFunc add(const RatFunc& a, const RatFunc& b) {
    if (a.den == b.den) return {a.num + b.num, a.den};
    return {a.num * b.den + b.num * a.den, a.den * b.den};
}
inline RatFunc mul(const RatFunc& a, const RatFunc& b) { return {a.num * b.num, a.den * b.den}; }
inline RatFunc pow(const RatFunc& a, int e) { return {a.num.pow(e), a.den.pow(e)}; }

struct SubstState {
    const CandidateFamily* fam;
    std::vector<Poly> denominators;  // recorded nonzero requirements

    void note_denominator(const Poly& d) {
        if (d.as_constant()) return;  // constant denominators carry no condition
        Poly canon = constraint_canon(d);
        for (const auto& e : denominators)
            if (e == canon) return;
        denominators.push_back(canon);
    }

    RatFunc apply_family(const RatFunc& arg) {
        int deg = fam->degree();
        // Polynomial part with common denominator arg.den^deg.
        Poly num = Poly::zero();
        Poly den = arg.den.pow(deg);
        for (int i = 0; i <= deg; ++i)
            num += fam->coeff(i) * arg.num.pow(i) * arg.den.pow(deg - i);
        RatFunc out{num, den};
        if (fam->has_recip()) {
            if (arg.num.is_zero())
                throw FeError(FeError::Code::Unsupported,
                              "reciprocal family applied to an identically zero argument");
            note_denominator(arg.num);
            out = add(out, RatFunc{fam->recip * arg.den, arg.num});
        }
        return out;
    }

    RatFunc subst(const Expr& e) {
        switch (e.kind()) {
            case ExprKind::Variable:
            case ExprKind::Parameter:
            case ExprKind::Constant:
                return RatFunc::whole(normalize(e));
            case ExprKind::FApply:
                return apply_family(subst(e.node().kids[0]));
            case ExprKind::Sum: {
                RatFunc acc = RatFunc::whole(Poly::zero());
                for (const auto& k : e.node().kids) acc = add(acc, subst(k));
                return acc;
            }
            case ExprKind::Product: {
                RatFunc acc = RatFunc::whole(Poly::constant(Rational(1)));
                for (const auto& k : e.node().kids) acc = mul(acc, subst(k));
                return acc;
            }
            case ExprKind::Power:
                return pow(subst(e.node().kids[0]), e.node().exponent);
        }
        throw FeError(FeError::Code::Internal, "subst: bad expression");
    }
};

}  // namespace verify_detail

// Substitutes the family for every f-occurrence (innermost first), clears
// denominators, and turns each coefficient of the resulting polynomial in
// the quantified variables into one parameter constraint.
inline ConstraintSet substitute_candidate(const ProblemSpec& p, const CandidateFamily& fam) {
    verify_detail::SubstState st{&fam, {}};
    verify_detail::RatFunc lhs = st.subst(to_expr(p.equation.lhs));
    verify_detail::RatFunc rhs = st.subst(to_expr(p.equation.rhs));
    Poly diff = lhs.num * rhs.den - rhs.num * lhs.den;

    // Group by the monomial over quantified variables; the parameter part
    // of each group must vanish identically.
    std::map<Monomial, Poly, MonomialLess> groups;
    for (const auto& [m, c] : diff.terms()) {
        Monomial var_part, param_part;
        for (const auto& [a, pw] : m.factors) {
            bool quantified = a.kind == Atom::Kind::Variable && p.equation.domain_of(a.name);
            if (a.kind == Atom::Kind::FApply)
                throw FeError(FeError::Code::Internal, "family substitution left an f-term");
            (quantified ? var_part : param_part).factors.emplace_back(a, pw);
        }
        groups[var_part] += Poly::from_monomial(param_part, c);
    }

    ConstraintSet cs;
    cs.family = fam;
    cs.domain = p.domain;
    cs.codomain = p.codomain;
    for (const auto& [vm, coeff] : groups) {
        Poly canon = constraint_canon(coeff);
        if (canon.is_zero()) continue;
        bool seen = false;
        for (const auto& c : cs.constraints)
            if (c == canon) { seen = true; break; }
        if (!seen) cs.constraints.push_back(canon);
    }
    for (const auto& d : st.denominators)
        cs.conditions.push_back({SideCondition::Kind::NonZero, d});
    return cs;
}

// ---- exact solving -----------------------------------------------------------

namespace verify_detail {

inline Poly subst_params(const Poly& p, const std::map<std::string, Rational>& asg) {
    if (asg.empty()) return p;
    Poly out;
    for (const auto& [m, c] : p.terms()) {
        Rational coeff = c;
        Monomial rest;
        for (const auto& [a, pw] : m.factors) {
            if (a.kind == Atom::Kind::Parameter && asg.count(a.name))
                coeff *= rat_pow(asg.at(a.name), pw);
            else rest.factors.emplace_back(a, pw);
        }
        out.add_term(rest, coeff);
    }
    return out;
}

// Univariate view: coefficient vector (ascending) if p involves exactly one
// parameter and nothing else.
inline std::optional<std::pair<std::string, std::vector<Rational>>> as_univariate(const Poly& p) {
    std::string name;
    int maxdeg = 0;
    for (const auto& [m, c] : p.terms()) {
        if (m.is_constant()) continue;
        if (m.factors.size() != 1 || m.factors[0].first.kind != Atom::Kind::Parameter)
            return std::nullopt;
        if (name.empty()) name = m.factors[0].first.name;
        if (m.factors[0].first.name != name) return std::nullopt;
        maxdeg = std::max(maxdeg, m.factors[0].second);
    }
    if (name.empty()) return std::nullopt;
    std::vector<Rational> coeffs(maxdeg + 1, Rational(0));
    for (const auto& [m, c] : p.terms())
        coeffs[m.is_constant() ? 0 : m.factors[0].second] = c;
    return std::make_pair(name, coeffs);
}

inline std::vector<BigInt> divisors(BigInt n) {
    n = boost::multiprecision::abs(n);
    std::vector<BigInt> out;
    for (BigInt i = 1; i * i <= n; ++i) {
        if (n % i == 0) {
            out.push_back(i);
            if (i * i != n) out.push_back(n / i);
        }
        if (i > 2'000'000) return out;  // cap: incomplete lists only shrink the root set
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Rational roots of an integer-coefficient polynomial by the p/q test,
// ascending. Root 0 handled by trailing-zero stripping.
inline std::vector<Rational> rational_roots(std::vector<Rational> coeffs) {
    while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
    if (coeffs.size() <= 1) return {};
    BigInt l = 1;
    for (const auto& c : coeffs) l = boost::multiprecision::lcm(l, den(c));
    std::vector<BigInt> ic;
    for (const auto& c : coeffs) ic.push_back(BigInt(c * l));

    std::vector<Rational> roots;
    size_t low = 0;
    while (low < ic.size() && ic[low] == 0) ++low;
    if (low > 0) roots.push_back(Rational(0));
    if (low + 1 >= ic.size()) return roots;

    auto eval_at = [&](const Rational& x) {
        Rational acc(0);
        for (size_t i = ic.size(); i-- > low;) acc = acc * x + Rational(ic[i]);
        return acc;
    };
    for (const auto& pd : divisors(ic[low]))
        for (const auto& qd : divisors(ic.back()))
            for (int sign : {1, -1}) {
                Rational cand = make_rational(sign * pd, qd);
                if (eval_at(cand) == 0) {
                    bool seen = false;
                    for (const auto& r : roots)
                        if (r == cand) { seen = true; break; }
                    if (!seen) roots.push_back(cand);
                }
            }
    std::sort(roots.begin(), roots.end());
    return roots;
}

// Synthetic division by (x - r) for every listed root (each root once);
// returns ascending coefficients of the quotient.
inline std::vector<Rational> deflate(std::vector<Rational> coeffs,
                                     const std::vector<Rational>& roots) {
    while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
    for (const auto& r : roots) {
        if (coeffs.size() < 2) break;
        std::vector<Rational> q(coeffs.size() - 1, Rational(0));
        Rational carry(0);
        for (size_t i = coeffs.size(); i-- > 1;) {
            carry = coeffs[i] + carry * r;
            q[i - 1] = carry;
        }
        coeffs = q;
    }
    return coeffs;
}

inline Poly poly_from_coeffs(const std::string& param, const std::vector<Rational>& coeffs) {
    Poly out;
    Poly x = Poly::from_atom(Atom::parameter(param));
    for (size_t i = 0; i < coeffs.size(); ++i) out += x.pow(static_cast<int>(i)).scaled(coeffs[i]);
    return out;
}

// Sufficient admissibility check of a fully concrete family against the
// problem domain/codomain. Conservative: families it cannot certify are
// rejected with a note.
inline std::optional<std::string> admissibility_failure(const CandidateFamily& fam,
                                                        DomainKind domain, DomainKind codomain) {
    std::vector<Rational> cs;
    for (const auto& c : fam.poly_coeffs) cs.push_back(*c.as_constant());
    Rational recip = *fam.recip.as_constant();

    bool all_zero = recip == 0;
    for (const auto& c : cs)
        if (c != 0) all_zero = false;

    if (domain_is_positive(codomain)) {
        for (const auto& c : cs)
            if (c < 0) return "negative coefficient over a positive codomain";
        if (recip < 0) return "negative coefficient over a positive codomain";
        if (all_zero) return "zero function over a positive codomain";
    }
    if (domain_is_integer(codomain)) {
        if (recip != 0) return "reciprocal shape over an integer codomain";
        for (const auto& c : cs)
            if (!is_integer(c)) return "non-integer coefficient over an integer codomain";
    }
    if (codomain == DomainKind::PositiveIntegers) {
        // f(1) >= 1 suffices together with nonnegative coefficients.
        Rational at1(0);
        for (const auto& c : cs) at1 += c;
        at1 += recip;
        if (at1 < 1) return "value below 1 over N*";
    }
    (void)domain;
    return std::nullopt;
}

}  // namespace verify_detail

// Exact solving: repeated single-parameter linear elimination and
// rational-root branching on univariate constraints up to degree 4;
// whatever survives is reported residual, never approximated.
inline ConstraintSet solve_constraints(const ConstraintSet& unsolved) {
    using namespace verify_detail;
    ConstraintSet cs = unsolved;
    cs.branches.clear();
    cs.rejected.clear();

    struct Work {
        std::map<std::string, Rational> asg;
        std::vector<Poly> cons;    // still being solved
        std::vector<Poly> finals;  // residual: no rational roots, left exact
    };
    std::deque<Work> work;
    work.push_back({{}, cs.constraints, {}});
    bool any_dead = false;

    int guard = 0;
    while (!work.empty()) {
        if (++guard > 256) throw FeError(FeError::Code::Internal, "solver branch explosion");
        Work w = work.front();
        work.pop_front();

        // Normalize under the current assignment.
        bool dead = false;
        bool progress = true;
        while (progress && !dead) {
            progress = false;
            std::vector<Poly> next;
            for (const auto& c : w.cons) {
                Poly s = constraint_canon(subst_params(c, w.asg));
                if (s.is_zero()) continue;
                if (auto k = s.as_constant()) {
                    if (*k != 0) { dead = true; break; }
                    continue;
                }
                next.push_back(s);
            }
            if (dead) break;
            w.cons = next;

            // Single-parameter linear constraints assign directly.
            for (const auto& c : w.cons) {
                auto uni = as_univariate(c);
                if (!uni || uni->second.size() != 2) continue;
                Rational value = -uni->second[0] / uni->second[1];
                w.asg[uni->first] = value;
                progress = true;
                break;
            }
        }
        if (dead) { any_dead = true; continue; }

        // Univariate nonlinear constraint: branch on rational roots.
        bool branched = false;
        for (size_t i = 0; i < w.cons.size(); ++i) {
            auto uni = as_univariate(w.cons[i]);
            if (!uni || uni->second.size() < 3 || uni->second.size() > 5) continue;
            auto roots = rational_roots(uni->second);
            std::vector<Poly> others;
            for (size_t j = 0; j < w.cons.size(); ++j)
                if (j != i) others.push_back(w.cons[j]);
            if (roots.empty()) {
                // No rational roots: the condition is final and exact.
                Work child{w.asg, others, w.finals};
                child.finals.push_back(w.cons[i]);
                work.push_back(child);
            } else {
                for (const auto& r : roots) {
                    Work child{w.asg, others, w.finals};
                    child.asg[uni->first] = r;
                    work.push_back(child);
                }
                // Whatever does not factor over Q stays residual.
                auto quotient = deflate(uni->second, roots);
                if (quotient.size() >= 2) {
                    Work child{w.asg, others, w.finals};
                    child.finals.push_back(constraint_canon(poly_from_coeffs(uni->first, quotient)));
                    work.push_back(child);
                }
            }
            branched = true;
            break;
        }
        if (branched) continue;

        // Terminal branch.
        ConstraintSet::Branch b;
        b.assignment = w.asg;
        b.residual = w.cons;
        bool final_dead = false;
        for (const auto& f : w.finals) {
            Poly s = constraint_canon(subst_params(f, w.asg));
            if (s.is_zero()) continue;
            if (auto k = s.as_constant()) {
                if (*k != 0) { final_dead = true; break; }
                continue;
            }
            b.residual.push_back(s);
        }
        if (final_dead) { any_dead = true; continue; }
        if (b.residual.empty()) {
            CandidateFamily inst = cs.family.assigned(b.assignment);
            if (inst.concrete()) {
                auto fail = admissibility_failure(inst, cs.domain, cs.codomain);
                if (fail) {
                    std::string note;
                    for (const auto& [p, v] : b.assignment) note += p + "=" + rat_str(v) + " ";
                    cs.rejected.push_back(note + "(" + *fail + ")");
                    continue;
                }
            }
        }
        cs.branches.push_back(std::move(b));
    }

    // Deduplicate branches (root branching can revisit assignments).
    std::vector<ConstraintSet::Branch> unique;
    for (const auto& b : cs.branches) {
        bool seen = false;
        for (const auto& u : unique) {
            if (u.assignment == b.assignment && u.residual.size() == b.residual.size()) {
                bool same = true;
                for (size_t i = 0; i < u.residual.size(); ++i)
                    if (u.residual[i] != b.residual[i]) { same = false; break; }
                if (same) { seen = true; break; }
            }
        }
        if (!seen) unique.push_back(b);
    }
    cs.branches = unique;

    bool any_clean = false, any_residual = false;
    for (const auto& b : cs.branches) (b.residual.empty() ? any_clean : any_residual) = true;
    if (any_clean) cs.status = ConstraintSet::Status::Satisfiable;
    else if (any_residual) cs.status = ConstraintSet::Status::Residual;
    else cs.status = ConstraintSet::Status::Unsatisfiable;
    (void)any_dead;
    return cs;
}

// True iff the fully assigned closed form satisfies the equation
// identically: every constraint reduces to 0 = 0 and the family passes the
// domain admissibility check.
inline bool verify_concrete(const ProblemSpec& p, const CandidateFamily& closed_form) {
    if (!closed_form.concrete())
        throw FeError(FeError::Code::Domain, "verify_concrete: family has unassigned parameters");
    ConstraintSet cs = substitute_candidate(p, closed_form);
    for (const auto& c : cs.constraints) {
        auto k = c.as_constant();
        if (!k || *k != 0) return false;
    }
    if (verify_detail::admissibility_failure(closed_form, p.domain, p.codomain)) return false;
    return true;
}

// ---- expectation comparison ----------------------------------------------------

namespace verify_detail {

inline std::vector<std::vector<Poly>> solved_branch_polys(const ConstraintSet& solved) {
    std::vector<std::vector<Poly>> out;
    for (const auto& b : solved.branches) {
        std::vector<Poly> polys;
        for (const auto& [p, v] : b.assignment) {
            Poly eq = Poly::from_atom(Atom::parameter(p)) - Poly::constant(v);
            polys.push_back(constraint_canon(eq));
        }
        for (const auto& r : b.residual) polys.push_back(constraint_canon(r));
        out.push_back(polys);
    }
    return out;
}

inline std::string branch_key(const std::vector<Poly>& polys) {
    std::vector<std::string> parts;
    for (const auto& p : polys) parts.push_back(render(p));
    std::sort(parts.begin(), parts.end());
    std::string key;
    for (const auto& s : parts) key += s + ";";
    return key;
}

}  // namespace verify_detail

// Compares the solved constraint set against an expect entry: exact
// equality of canonical constraint branches.
inline bool expectation_met(const ProblemSpec& p, const ExpectEntry& entry,
                            const ConstraintSet& solved) {
    using namespace verify_detail;
    if (entry.family.concrete() && entry.branches.empty())
        return verify_concrete(p, entry.family);

    std::vector<std::string> got;
    for (const auto& b : solved_branch_polys(solved)) got.push_back(branch_key(b));
    std::sort(got.begin(), got.end());

    std::vector<std::string> want;
    if (entry.branches.empty()) {
        want.push_back(branch_key({}));  // any parameter values
    } else {
        for (const auto& b : entry.branches) want.push_back(branch_key(b));
    }
    std::sort(want.begin(), want.end());
    return got == want;
}

}  // namespace fe
