#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "fe/parse.hpp"

namespace fetest {

using namespace fe;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ProblemSpec load_corpus(const std::string& id) {
    return parse_problem(read_file(std::string(FE_CORPUS_DIR) + "/" + id + ".fe"));
}

// Deterministic rational sampler for a domain.
struct Sampler {
    std::mt19937_64 rng;
    explicit Sampler(unsigned long long seed) : rng(seed) {}

    Rational rat(DomainKind d) {
        auto draw = [&](int lo, int hi) {
            return lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo + 1));
        };
        switch (d) {
            case DomainKind::Integers: return Rational(draw(-30, 30));
            case DomainKind::PositiveIntegers: return Rational(draw(1, 30));
            case DomainKind::PositiveReals:
            case DomainKind::Rationals:
            case DomainKind::Reals: {
                int n = d == DomainKind::PositiveReals ? draw(1, 60) : draw(-60, 60);
                int den = draw(1, 6);
                return Rational(n, den);
            }
        }
        return Rational(0);
    }
};

// Checks one fact at one sample point. Points outside tail bounds or
// violating recorded side conditions are vacuous (return true).
inline bool fact_holds_at(const Fact& f, const std::map<std::string, Rational>& env,
                          const Witness& w) {
    for (const auto& tb : f.tail_bounds) {
        auto it = env.find(tb.var);
        if (it == env.end()) return true;
        if (!(it->second > eval(tb.bound, env, w))) return true;
    }
    for (const auto& sc : f.side_conditions) {
        Rational v = eval(sc.expr, env, w);
        switch (sc.kind) {
            case SideCondition::Kind::Positive:
                if (!(v > 0)) return true;
                break;
            case SideCondition::Kind::NonZero:
                if (v == 0) return true;
                break;
            case SideCondition::Kind::IntegerValued:
                if (!is_integer(v)) return true;
                break;
            case SideCondition::Kind::NaturalValued:
                if (!is_integer(v) || v < 1) return true;
                break;
        }
    }
    return eval(f.lhs, env, w) == eval(f.rhs, env, w);
}

// Model-checks a fact against a witness at `n` random domain points.
// Parameters get values from `params`.
inline bool fact_holds(const Fact& f, DomainKind domain, const Witness& w, int n,
                       Sampler& s, std::map<std::string, Rational> params = {}) {
    for (int i = 0; i < n; ++i) {
        std::map<std::string, Rational> env = params;
        for (const auto& [v, d] : f.quantified) env[v] = s.rat(d);
        (void)domain;
        if (!fact_holds_at(f, env, w)) return false;
    }
    return true;
}

}  // namespace fetest
