#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace fe {

// Exact rational arithmetic. cpp_rational keeps values reduced with a
// positive denominator, which is exactly the invariant the expression
// layer needs.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt den(const Rational& q) { return boost::multiprecision::denominator(q); }

inline bool is_integer(const Rational& q) { return den(q) == 1; }

// Constructs n/d with the sign carried by the numerator; d must be nonzero.
inline Rational make_rational(BigInt n, BigInt d) {
    if (d == 0) throw std::invalid_argument("make_rational: zero denominator");
    if (d < 0) { n = -n; d = -d; }
    return Rational(std::move(n), std::move(d));
}

inline Rational rat_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline Rational rat_pow(const Rational& base, int exp) {
    if (exp < 0) throw std::invalid_argument("rat_pow: negative exponent");
    Rational acc(1);
    Rational b = base;
    int e = exp;
    while (e > 0) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

// Renders integers bare and non-integers as "p/q".
inline std::string rat_str(const Rational& q) {
    if (is_integer(q)) return num(q).str();
    return num(q).str() + "/" + den(q).str();
}

// Parses "p" or "p/q" with optional leading '-'. Returns nullopt on junk.
inline std::optional<Rational> rat_parse(const std::string& s) {
    if (s.empty()) return std::nullopt;
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(s));
        BigInt n(s.substr(0, slash));
        BigInt d(s.substr(slash + 1));
        if (d == 0) return std::nullopt;
        return make_rational(n, d);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace fe
