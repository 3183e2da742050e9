#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fe/error.hpp"
#include "fe/fact.hpp"

namespace fe {

// Parametric closed form submitted for verification:
//
//   f(t) = c0 + c1*t + ... + cd*t^d + r/t
//
// with every slot a polynomial in unknown parameters (often just a
// parameter or a rational). Degree is capped at 3; the r/t part gives the
// reciprocal-affine shape. Validity above a tail is recorded for families
// produced by sufficiently-large arguments; verification substitutes them
// globally and the tail only qualifies the derivation claim.
struct CandidateFamily {
    std::vector<Poly> poly_coeffs;  // c0..cd, parameter polynomials
    Poly recip;                     // r, zero when absent
    std::vector<std::string> params;

    enum class Validity { FullDomain, AboveTail };
    Validity validity = Validity::FullDomain;
    Poly tail;

    std::vector<std::string> sign_notes;  // recorded admissibility notes

    static constexpr int kMaxDegree = 3;

    int degree() const {
        for (int d = static_cast<int>(poly_coeffs.size()) - 1; d >= 0; --d)
            if (!poly_coeffs[d].is_zero()) return d;
        return 0;
    }
    bool has_recip() const { return !recip.is_zero(); }
    bool concrete() const { return params.empty(); }

    Poly coeff(int i) const {
        return i < static_cast<int>(poly_coeffs.size()) ? poly_coeffs[i] : Poly::zero();
    }

    std::string shape_name() const {
        if (has_recip()) return "reciprocal-affine";
        int d = degree();
        if (d == 0) return "constant";
        if (d == 1) return coeff(0).is_zero() ? "linear" : "affine";
        return "poly-deg-" + std::to_string(d);
    }

    // f(x) with x the display variable.
    std::string str() const {
        Poly x = Poly::from_atom(Atom::variable("x"));
        Poly body;
        for (size_t i = 0; i < poly_coeffs.size(); ++i) body += poly_coeffs[i] * x.pow(static_cast<int>(i));
        std::string out = "f(x) = ";
        if (has_recip()) {
            std::string r = render(recip);
            out += (recip.size() > 1 ? "(" + r + ")" : r) + "/x";
            if (!body.is_zero()) out += " + " + render(body);
        } else {
            out += render(body);
        }
        if (validity == Validity::AboveTail) out += "  [for x > " + render(tail) + "]";
        return out;
    }

    // Substitutes concrete values for a subset of parameters.
    CandidateFamily assigned(const std::map<std::string, Rational>& values) const {
        Bindings b;
        for (const auto& [k, v] : values) b[k] = Expr::rational(v);
        auto subst_params = [&](const Poly& p) {
            // Parameters substitute like variables after a rename pass.
            Expr e = to_expr(p);
            std::function<Expr(const Expr&)> go = [&](const Expr& t) -> Expr {
                switch (t.kind()) {
                    case ExprKind::Parameter: {
                        auto it = b.find(t.node().name);
                        return it == b.end() ? t : it->second;
                    }
                    case ExprKind::FApply: return Expr::f(go(t.node().kids[0]));
                    case ExprKind::Sum:
                    case ExprKind::Product: {
                        std::vector<Expr> kids;
                        for (const auto& k : t.node().kids) kids.push_back(go(k));
                        return t.kind() == ExprKind::Sum ? Expr::sum(std::move(kids))
                                                         : Expr::product(std::move(kids));
                    }
                    case ExprKind::Power: return Expr::power(go(t.node().kids[0]), t.node().exponent);
                    default: return t;
                }
            };
            return normalize(go(e));
        };
        CandidateFamily out = *this;
        for (auto& c : out.poly_coeffs) c = subst_params(c);
        out.recip = subst_params(out.recip);
        out.params.clear();
        for (const auto& p : params)
            if (!values.count(p)) out.params.push_back(p);
        return out;
    }

    // Evaluates a fully concrete family at a rational point.
    std::optional<Rational> eval_at(const Rational& x) const {
        if (!concrete()) throw FeError(FeError::Code::Internal, "family not concrete");
        Rational acc(0);
        for (size_t i = 0; i < poly_coeffs.size(); ++i) {
            auto c = poly_coeffs[i].as_constant();
            if (!c) throw FeError(FeError::Code::Internal, "family coefficient not constant");
            acc += *c * rat_pow(x, static_cast<int>(i));
        }
        if (has_recip()) {
            auto r = recip.as_constant();
            if (!r) throw FeError(FeError::Code::Internal, "family coefficient not constant");
            if (x == 0) return std::nullopt;  // division by zero
            acc += *r / x;
        }
        return acc;
    }

    static CandidateFamily constant(Poly c0) {
        CandidateFamily f;
        f.poly_coeffs = {std::move(c0)};
        f.finish_params();
        return f;
    }
    static CandidateFamily linear(Poly c1) {
        CandidateFamily f;
        f.poly_coeffs = {Poly::zero(), std::move(c1)};
        f.finish_params();
        return f;
    }
    static CandidateFamily affine(Poly c1, Poly c0) {
        CandidateFamily f;
        f.poly_coeffs = {std::move(c0), std::move(c1)};
        f.finish_params();
        return f;
    }
    static CandidateFamily reciprocal_affine(Poly r, Poly c0) {
        CandidateFamily f;
        f.poly_coeffs = {std::move(c0)};
        f.recip = std::move(r);
        f.finish_params();
        return f;
    }

    void finish_params() {
        std::set<std::string> seen;
        params.clear();
        auto scan = [&](const Poly& p) {
            std::set<std::string> vars, ps;
            collect_names(p, vars, ps);
            if (!vars.empty() || contains_f(p))
                throw FeError(FeError::Code::Unsupported,
                              "family coefficients must be parameter expressions");
            for (const auto& n : ps)
                if (seen.insert(n).second) params.push_back(n);
        };
        for (const auto& c : poly_coeffs) scan(c);
        scan(recip);
        if (static_cast<int>(poly_coeffs.size()) > kMaxDegree + 1 && degree() > kMaxDegree)
            throw FeError(FeError::Code::Unsupported, "family degree exceeds 3");
    }
};

}  // namespace fe
