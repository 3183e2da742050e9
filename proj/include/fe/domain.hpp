#pragma once

#include <map>
#include <optional>
#include <string>

#include "fe/canonical.hpp"

namespace fe {

// PositiveReals and PositiveIntegers exclude 0; PositiveIntegers means
// integers >= 1.
enum class DomainKind { Reals, PositiveReals, Rationals, Integers, PositiveIntegers };

inline std::string domain_str(DomainKind d) {
    switch (d) {
        case DomainKind::Reals: return "R";
        case DomainKind::PositiveReals: return "R+";
        case DomainKind::Rationals: return "Q";
        case DomainKind::Integers: return "Z";
        case DomainKind::PositiveIntegers: return "N*";
    }
    return {};
}

inline std::optional<DomainKind> domain_parse(const std::string& s) {
    if (s == "R") return DomainKind::Reals;
    if (s == "R+") return DomainKind::PositiveReals;
    if (s == "Q") return DomainKind::Rationals;
    if (s == "Z") return DomainKind::Integers;
    if (s == "N*") return DomainKind::PositiveIntegers;
    return std::nullopt;
}

inline bool domain_is_integer(DomainKind d) {
    return d == DomainKind::Integers || d == DomainKind::PositiveIntegers;
}
inline bool domain_is_positive(DomainKind d) {
    return d == DomainKind::PositiveReals || d == DomainKind::PositiveIntegers;
}
inline bool domain_is_rational(DomainKind d) { return d != DomainKind::Reals; }

inline bool domain_contains(DomainKind d, const Rational& q) {
    switch (d) {
        case DomainKind::Reals:
        case DomainKind::Rationals: return true;
        case DomainKind::PositiveReals: return q > 0;
        case DomainKind::Integers: return is_integer(q);
        case DomainKind::PositiveIntegers: return is_integer(q) && q >= 1;
    }
    return false;
}

// Value-domain context for syntactic evidence checks: quantified variables
// take the problem domain, f-atoms the codomain, parameters their declared
// domain (unknown when undeclared).
struct DomainCtx {
    DomainKind var_domain = DomainKind::Reals;
    DomainKind codomain = DomainKind::Reals;
    std::map<std::string, DomainKind> param_domains;

    std::optional<DomainKind> atom_domain(const Atom& a) const {
        switch (a.kind) {
            case Atom::Kind::Variable: return var_domain;
            case Atom::Kind::FApply: return codomain;
            case Atom::Kind::Parameter: {
                auto it = param_domains.find(a.name);
                if (it == param_domains.end()) return std::nullopt;
                return it->second;
            }
        }
        return std::nullopt;
    }
};

// The checks below are conservative: "false" means "not syntactically
// evident", never "false in the model".

inline bool evidently_integer(const Poly& p, const DomainCtx& ctx) {
    for (const auto& [m, c] : p.terms()) {
        if (!is_integer(c)) return false;
        for (const auto& [a, pw] : m.factors) {
            auto d = ctx.atom_domain(a);
            if (!d || !domain_is_integer(*d)) return false;
        }
    }
    return true;
}

namespace detail {
// coeff > 0 and every factor positive-valued.
inline bool monomial_positive(const Monomial& m, const Rational& c, const DomainCtx& ctx) {
    if (c <= 0) return false;
    for (const auto& [a, pw] : m.factors) {
        auto d = ctx.atom_domain(a);
        if (!d || !domain_is_positive(*d)) return false;
    }
    return true;
}
// coeff > 0 and every factor positive-valued or raised to an even power.
inline bool monomial_nonneg(const Monomial& m, const Rational& c, const DomainCtx& ctx) {
    if (c <= 0) return false;
    for (const auto& [a, pw] : m.factors) {
        auto d = ctx.atom_domain(a);
        bool positive = d && domain_is_positive(*d);
        if (!positive && pw % 2 != 0) return false;
    }
    return true;
}
}  // namespace detail

// Strictly positive on the whole context: all monomials nonnegative and at
// least one strictly positive.
inline bool evidently_positive(const Poly& p, const DomainCtx& ctx) {
    bool some_positive = false;
    for (const auto& [m, c] : p.terms()) {
        if (!detail::monomial_nonneg(m, c, ctx)) return false;
        if (detail::monomial_positive(m, c, ctx)) some_positive = true;
    }
    return some_positive;
}

inline bool evidently_nonneg(const Poly& p, const DomainCtx& ctx) {
    for (const auto& [m, c] : p.terms())
        if (!detail::monomial_nonneg(m, c, ctx)) return false;
    return true;
}

// Integer and strictly positive, i.e. a natural number >= 1.
inline bool evidently_natural(const Poly& p, const DomainCtx& ctx) {
    return evidently_integer(p, ctx) && evidently_positive(p, ctx);
}

// Integer >= 0 (valid k-fold repetition count).
inline bool evidently_nonneg_integer(const Poly& p, const DomainCtx& ctx) {
    return evidently_integer(p, ctx) && evidently_nonneg(p, ctx);
}

inline bool evidently_rational(const Poly& p, const DomainCtx& ctx) {
    for (const auto& [m, c] : p.terms())
        for (const auto& [a, pw] : m.factors) {
            auto d = ctx.atom_domain(a);
            if (!d || !domain_is_rational(*d)) return false;
        }
    return true;
}

inline bool evidently_in_domain(const Poly& p, DomainKind target, const DomainCtx& ctx) {
    switch (target) {
        case DomainKind::Reals: return true;
        case DomainKind::Rationals: return evidently_rational(p, ctx);
        case DomainKind::Integers: return evidently_integer(p, ctx);
        case DomainKind::PositiveReals: return evidently_positive(p, ctx);
        case DomainKind::PositiveIntegers: return evidently_natural(p, ctx);
    }
    return false;
}

}  // namespace fe
