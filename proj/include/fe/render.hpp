#pragma once

#include <string>

#include "fe/canonical.hpp"

namespace fe {

inline std::string render(const Poly& p);

inline std::string render(const Atom& a) {
    switch (a.kind) {
        case Atom::Kind::Variable:
        case Atom::Kind::Parameter:
            return a.name;
        case Atom::Kind::FApply:
            return "f(" + render(*a.arg) + ")";
    }
    return {};
}

// Coefficient-magnitude and atom factors, without the sign. Factors print
// parameters first, then variables, then f-terms, the way constants are
// conventionally written ahead of variables (2*c*x, not 2*x*c).
inline std::string render_unsigned(const Monomial& m, const Rational& c) {
    Rational mag = rat_abs(c);
    std::string out;
    bool coeff_shown = (mag != 1) || m.is_constant();
    if (coeff_shown) out = rat_str(mag);
    auto rank = [](const Atom& a) {
        switch (a.kind) {
            case Atom::Kind::Parameter: return 0;
            case Atom::Kind::Variable: return 1;
            case Atom::Kind::FApply: return 2;
        }
        return 3;
    };
    auto factors = m.factors;
    std::stable_sort(factors.begin(), factors.end(),
                     [&](const auto& x, const auto& y) {
                         if (rank(x.first) != rank(y.first)) return rank(x.first) < rank(y.first);
                         return cmp(x.first, y.first) < 0;
                     });
    for (const auto& [a, p] : factors) {
        if (!out.empty()) out += "*";
        out += render(a);
        if (p > 1) out += "^" + std::to_string(p);
    }
    return out;
}

// Deterministic pretty-printer over the canonical form; parsing the result
// and normalizing gives back the same polynomial.
inline std::string render(const Poly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : p.terms()) {
        if (first) {
            if (c < 0) out += "-";
            first = false;
        } else {
            out += c < 0 ? " - " : " + ";
        }
        out += render_unsigned(m, c);
    }
    return out;
}

inline std::string render(const Expr& e) { return render(normalize(e)); }

}  // namespace fe
