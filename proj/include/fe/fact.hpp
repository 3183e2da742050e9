#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fe/domain.hpp"
#include "fe/render.hpp"

namespace fe {

// A recorded, undischarged obligation attached to a fact: the expression
// must satisfy the kind for every admissible assignment of the fact's
// quantified variables. Conditions are bookkeeping only; nothing proves
// them, and facts carrying any are flagged conditional.
struct SideCondition {
    enum class Kind { Positive, NonZero, IntegerValued, NaturalValued };
    Kind kind;
    Poly expr;

    std::string str() const {
        switch (kind) {
            case Kind::Positive: return render(expr) + " > 0";
            case Kind::NonZero: return render(expr) + " != 0";
            case Kind::IntegerValued: return render(expr) + " in Z";
            case Kind::NaturalValued: return render(expr) + " in N";
        }
        return {};
    }
};

inline int cmp(const SideCondition& a, const SideCondition& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind) ? -1 : 1;
    return cmp(a.expr, b.expr);
}

// Strict lower bound on one quantified variable ("for all v > bound").
struct TailBound {
    std::string var;
    Poly bound;

    std::string str() const { return var + " > " + render(bound); }
};

inline int cmp(const TailBound& a, const TailBound& b) {
    if (int c = a.var.compare(b.var)) return c < 0 ? -1 : 1;
    return cmp(a.bound, b.bound);
}

struct Provenance {
    std::string move;        // move descriptor, e.g. "instantiate", "subtract"
    std::vector<int> parents;  // fact ids in the owning knowledge base
    std::string detail;      // human-readable argument summary
};

// Universally quantified equation with per-variable domains, tail bounds,
// side conditions and provenance.
struct Fact {
    Poly lhs;
    Poly rhs;
    std::vector<std::pair<std::string, DomainKind>> quantified;
    std::vector<TailBound> tail_bounds;
    std::vector<SideCondition> side_conditions;
    Provenance provenance;

    Poly diff() const { return lhs - rhs; }
    bool trivial() const { return diff().is_zero(); }
    bool conditional() const { return !side_conditions.empty(); }

    std::optional<DomainKind> domain_of(const std::string& var) const {
        for (const auto& [n, d] : quantified)
            if (n == var) return d;
        return std::nullopt;
    }

    void add_tail(const TailBound& t) {
        for (const auto& e : tail_bounds)
            if (cmp(e, t) == 0) return;
        tail_bounds.push_back(t);
    }
    void add_condition(const SideCondition& c) {
        for (const auto& e : side_conditions)
            if (cmp(e, c) == 0) return;
        side_conditions.push_back(c);
    }

    std::string str() const {
        std::string out = render(lhs) + " = " + render(rhs);
        if (!quantified.empty()) {
            out += "   [forall";
            for (const auto& [n, d] : quantified) out += " " + n;
            out += "]";
        }
        for (const auto& t : tail_bounds) out += "  {" + t.str() + "}";
        for (const auto& c : side_conditions) out += "  {if " + c.str() + "}";
        return out;
    }
};

// Canonical key: monic lhs-rhs plus quantifier signature. Tail bounds and
// side conditions intentionally excluded so duplicates dedup; insertion
// policy decides which copy survives.
inline std::string fact_key(const Fact& f) {
    std::string key = render(monic(f.diff()));
    key += " |";
    for (const auto& [n, d] : f.quantified) key += " " + n + ":" + domain_str(d);
    return key;
}

// The cde relation: for all t > tail in domain, f(t + shift) = f(t) + delta.
// `parameters` lists quantified variables the shift still depends on.
struct ShiftFact {
    Poly shift;
    Poly delta;
    std::optional<Poly> tail;  // absent: holds on the whole domain
    std::vector<std::string> parameters;
    int source_fact = -1;

    std::string str() const {
        std::string out = "f(t + " + render(shift) + ") = f(t) + " + render(delta);
        if (tail) out += "  for t > " + render(*tail);
        if (!parameters.empty()) {
            out += "  [params";
            for (const auto& p : parameters) out += " " + p;
            out += "]";
        }
        return out;
    }
};

// For all natural k: f(X + k*A(Y)) = f(X) + k*B(Y).
struct ParamShiftFact {
    Poly a_expr;
    Poly b_expr;
    std::string base_var;
    std::string param_var;
    std::string k_symbol;
    int source_fact = -1;

    std::string str() const {
        return "f(" + base_var + " + " + k_symbol + "*(" + render(a_expr) + ")) = f(" + base_var +
               ") + " + k_symbol + "*(" + render(b_expr) + ")   [forall " + k_symbol + " in N]";
    }
};

// Structural properties of f (or of an inner expression, for the
// composition lemma) recorded during a derivation.
struct PropertyFact {
    enum class Kind { Injective, SurjectiveOntoTail, Additive, Odd, PointValue };
    Kind kind;
    // Subject as an expression of subject_var; the default f itself is
    // f(subject_var).
    Poly subject;
    std::string subject_var;
    Poly bound;  // SurjectiveOntoTail
    Poly point;  // PointValue: f(point) = value, both ground
    Poly value;
    Provenance provenance;

    static PropertyFact point_value(Poly pt, Poly val) {
        PropertyFact p;
        p.kind = Kind::PointValue;
        p.point = std::move(pt);
        p.value = std::move(val);
        return p;
    }

    std::string str() const {
        switch (kind) {
            case Kind::Injective: return render(subject) + " injective in " + subject_var;
            case Kind::SurjectiveOntoTail:
                return render(subject) + " surjective onto (" + render(bound) + ", inf)";
            case Kind::Additive: return "f additive";
            case Kind::Odd: return "f odd";
            case Kind::PointValue: return "f(" + render(point) + ") = " + render(value);
        }
        return {};
    }
};

}  // namespace fe
