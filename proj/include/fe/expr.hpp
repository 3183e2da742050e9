#pragma once

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fe/rational.hpp"

namespace fe {

// Terms over variables, exact rationals, unknown parameters, +, *, integer
// powers, and applications of the single unknown function f. There is no
// division node: rationals carry all constant division, and reciprocal
// shapes live in the candidate-family layer.
enum class ExprKind { Variable, Constant, Parameter, FApply, Sum, Product, Power };

class Expr;
struct ExprNode {
    ExprKind kind;
    std::string name;        // Variable / Parameter
    Rational value;          // Constant
    std::vector<Expr> kids;  // FApply (1), Sum, Product, Power (1)
    int exponent = 0;        // Power, always >= 2
};

class Expr {
public:
    Expr() : node_(constant_node(Rational(0))) {}

    static Expr variable(std::string name) { return make(ExprKind::Variable, std::move(name)); }
    static Expr parameter(std::string name) { return make(ExprKind::Parameter, std::move(name)); }
    static Expr rational(Rational q) { return Expr(constant_node(std::move(q))); }
    static Expr integer(long long v) { return rational(Rational(v)); }

    static Expr f(Expr arg) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprKind::FApply;
        n->kids.push_back(std::move(arg));
        return Expr(std::move(n));
    }

    static Expr sum(std::vector<Expr> terms) {
        if (terms.empty()) return integer(0);
        if (terms.size() == 1) return terms.front();
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprKind::Sum;
        n->kids = std::move(terms);
        return Expr(std::move(n));
    }

    static Expr product(std::vector<Expr> factors) {
        if (factors.empty()) return integer(1);
        if (factors.size() == 1) return factors.front();
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprKind::Product;
        n->kids = std::move(factors);
        return Expr(std::move(n));
    }

    // Exponent 0 collapses to 1 and exponent 1 to the base, so stored
    // powers are always >= 2.
    static Expr power(Expr base, int exp) {
        if (exp < 0) throw std::invalid_argument("power: negative exponent not representable");
        if (exp == 0) return integer(1);
        if (exp == 1) return base;
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprKind::Power;
        n->kids.push_back(std::move(base));
        n->exponent = exp;
        return Expr(std::move(n));
    }

    const ExprNode& node() const { return *node_; }
    ExprKind kind() const { return node_->kind; }
    bool is(ExprKind k) const { return node_->kind == k; }

private:
    explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}

    static Expr make(ExprKind k, std::string name) {
        auto n = std::make_shared<ExprNode>();
        n->kind = k;
        n->name = std::move(name);
        return Expr(std::move(n));
    }

    static std::shared_ptr<const ExprNode> constant_node(Rational q) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprKind::Constant;
        n->value = std::move(q);
        return n;
    }

    std::shared_ptr<const ExprNode> node_;
};

inline Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
inline Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
inline Expr operator-(const Expr& a) { return Expr::product({Expr::integer(-1), a}); }
inline Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, -b}); }

using Bindings = std::map<std::string, Expr>;

// Simultaneous structural replacement of variables, descending into f
// arguments. Does not normalize; see substitute() in canonical.hpp.
inline Expr replace_vars(const Expr& e, const Bindings& bindings) {
    switch (e.kind()) {
        case ExprKind::Variable: {
            auto it = bindings.find(e.node().name);
            return it == bindings.end() ? e : it->second;
        }
        case ExprKind::Constant:
        case ExprKind::Parameter:
            return e;
        case ExprKind::FApply:
            return Expr::f(replace_vars(e.node().kids[0], bindings));
        case ExprKind::Sum:
        case ExprKind::Product: {
            std::vector<Expr> kids;
            kids.reserve(e.node().kids.size());
            for (const auto& k : e.node().kids) kids.push_back(replace_vars(k, bindings));
            return e.kind() == ExprKind::Sum ? Expr::sum(std::move(kids))
                                             : Expr::product(std::move(kids));
        }
        case ExprKind::Power:
            return Expr::power(replace_vars(e.node().kids[0], bindings), e.node().exponent);
    }
    throw std::logic_error("replace_vars: bad kind");
}

// Interpretation of the unknown function for model checks and oracles.
using Witness = std::function<Rational(const Rational&)>;

inline Witness affine_witness(Rational a, Rational b) {
    return [a = std::move(a), b = std::move(b)](const Rational& x) { return a * x + b; };
}

// Exact evaluation with every variable and parameter assigned a rational
// and f interpreted by the witness.
inline Rational eval(const Expr& e, const std::map<std::string, Rational>& env,
                     const Witness& w) {
    switch (e.kind()) {
        case ExprKind::Variable:
        case ExprKind::Parameter: {
            auto it = env.find(e.node().name);
            if (it == env.end()) throw std::invalid_argument("eval: unbound name " + e.node().name);
            return it->second;
        }
        case ExprKind::Constant:
            return e.node().value;
        case ExprKind::FApply:
            return w(eval(e.node().kids[0], env, w));
        case ExprKind::Sum: {
            Rational acc(0);
            for (const auto& k : e.node().kids) acc += eval(k, env, w);
            return acc;
        }
        case ExprKind::Product: {
            Rational acc(1);
            for (const auto& k : e.node().kids) acc *= eval(k, env, w);
            return acc;
        }
        case ExprKind::Power:
            return rat_pow(eval(e.node().kids[0], env, w), e.node().exponent);
    }
    throw std::logic_error("eval: bad kind");
}

}  // namespace fe
