#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fe/verify.hpp"

namespace fe {

struct Budget {
    int max_facts = 2000;
    int max_depth = 12;
};

// One executed move. `args` carries the move arguments in replayable form
// (bindings, registry references); `output_key` is the canonical key of the
// produced fact (or candidate/outcome summary) checked during replay.
struct TraceStep {
    std::string move;
    std::vector<int> inputs;
    std::string args;
    int output = -1;
    std::string output_key;
    std::vector<std::string> side_conditions;
};

struct SolutionEntry {
    CandidateFamily family;
    std::vector<std::string> conditions;  // residual constraints, rendered

    std::string str() const {
        std::string out = family.str();
        for (const auto& c : conditions) out += "  with " + c;
        return out;
    }
};

struct DerivationTrace {
    std::string problem;
    std::vector<TraceStep> steps;

    enum class Outcome { Verified, CandidateUnverified, Exhausted };
    Outcome outcome = Outcome::Exhausted;
    std::vector<SolutionEntry> solutions;
    std::vector<std::string> assumptions;  // undischarged side conditions on the path
    int rounds_used = 0;
    int facts_total = 0;

    std::string outcome_str() const {
        switch (outcome) {
            case Outcome::Verified: {
                std::string out = "Verified: ";
                for (size_t i = 0; i < solutions.size(); ++i) {
                    if (i) out += " | ";
                    out += solutions[i].str();
                }
                if (!assumptions.empty()) {
                    out += "  [assuming";
                    for (const auto& a : assumptions) out += " {" + a + "}";
                    out += "]";
                }
                return out;
            }
            case Outcome::CandidateUnverified: return "CandidateUnverified";
            case Outcome::Exhausted:
                return "Exhausted: facts=" + std::to_string(facts_total) +
                       " rounds=" + std::to_string(rounds_used);
        }
        return {};
    }

    std::string str() const {
        std::string out = "derivation of " + problem + "\n";
        for (size_t i = 0; i < steps.size(); ++i) {
            const auto& s = steps[i];
            out += "  s" + std::to_string(i) + " " + s.move;
            if (!s.inputs.empty()) {
                out += "(";
                for (size_t j = 0; j < s.inputs.size(); ++j)
                    out += (j ? "," : "") + std::string("#") + std::to_string(s.inputs[j]);
                out += ")";
            }
            if (!s.args.empty()) out += " [" + s.args + "]";
            out += " -> " + s.output_key;
            for (const auto& c : s.side_conditions) out += "  {if " + c + "}";
            out += "\n";
        }
        out += outcome_str() + "\n";
        return out;
    }
};

// Facts keyed by canonical form plus the derived-artifact registries the
// tactic schedule draws from. Insertion order is the only order used.
struct KnowledgeBase {
    std::vector<Fact> facts;
    std::map<std::string, int> by_key;

    struct Shift { ShiftFact s; int source; std::string key; };
    struct PShift { ParamShiftFact s; int source; std::string key; };
    struct Point { PropertyFact p; int source; std::string key; };
    struct Scaling { Rational k; int source; };
    struct Candidate { CandidateFamily family; int source; std::string key; };

    std::vector<Shift> shifts;
    std::vector<PShift> pshifts;
    std::vector<Point> points;
    std::vector<Scaling> scalings;
    std::vector<Candidate> candidates;

    std::string fingerprint() const {
        std::string out;
        for (const auto& f : facts) out += fact_key(f) + "\n";
        for (const auto& s : shifts) out += "shift " + s.key + "\n";
        for (const auto& c : candidates) out += "cand " + c.key + "\n";
        return out;
    }
};

namespace search_detail {

// Family key with positional parameter names, so structurally equal
// candidates from different scans deduplicate.
inline std::string family_key(const CandidateFamily& fam) {
    Bindings renames;
    int i = 0;
    for (const auto& p : fam.params) renames[p] = Expr::parameter("$p" + std::to_string(++i));
    auto norm = [&](const Poly& p) {
        Expr e = to_expr(p);
        std::function<Expr(const Expr&)> go = [&](const Expr& t) -> Expr {
            switch (t.kind()) {
                case ExprKind::Parameter: {
                    auto it = renames.find(t.node().name);
                    return it == renames.end() ? t : it->second;
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
        return render(normalize(go(e)));
    };
    std::string key = fam.shape_name() + ":";
    for (const auto& c : fam.poly_coeffs) key += norm(c) + "|";
    key += norm(fam.recip);
    if (fam.validity == CandidateFamily::Validity::AboveTail) key += "@tail";
    return key;
}

inline std::string shift_key(const ShiftFact& s) {
    std::string key = render(s.shift) + "/" + render(s.delta);
    for (const auto& p : s.parameters) key += ":" + p;
    if (s.tail) key += ">" + render(*s.tail);
    return key;
}

inline std::string bindings_str(const Bindings& b) {
    std::string out;
    for (const auto& [k, v] : b) {
        if (!out.empty()) out += "; ";
        out += k + " := " + render(v);
    }
    return out;
}

inline Bindings parse_bindings(const std::string& args, const ProblemSpec& p) {
    Bindings out;
    size_t pos = 0;
    std::set<std::string> params;
    for (const auto& [n, d] : p.parameters) params.insert(n);
    while (pos < args.size()) {
        size_t next = args.find("; ", pos);
        std::string item = args.substr(pos, next == std::string::npos ? next : next - pos);
        pos = next == std::string::npos ? args.size() : next + 2;
        size_t eq = item.find(" := ");
        if (eq == std::string::npos)
            throw FeError(FeError::Code::Internal, "replay: malformed bindings '" + args + "'");
        std::string name = item.substr(0, eq);
        std::string image = item.substr(eq + 4);
        detail::TokenStream ts(lex::tokenize(image));
        detail::IdentClassifier cls = [&](const std::string& id) -> std::optional<Expr> {
            if (params.count(id)) return Expr::parameter(id);
            return Expr::variable(id);
        };
        detail::ExprParser ep(ts, cls);
        out[name] = ep.expr();
    }
    return out;
}

}  // namespace search_detail

// Deterministic heuristic driver. Each round applies, in fixed order:
// ground-pool instantiation (including discovered point values and
// scalings), the iteration substitution, rewriting with known facts and
// shift relations, shift differences on the axiom, and the lemma scans;
// candidate families are verified as they appear and the first confirmed
// one ends the run.
class Engine {
public:
    Engine(const ProblemSpec& p, Budget budget) : p_(p), budget_(budget), ctx_(p.ctx()) {}

    DerivationTrace derive() {
        trace_ = {};
        trace_.problem = p_.id;
        recording_ = true;
        seed_axiom();

        for (int round = 1; round <= budget_.max_depth && !budget_hit_; ++round) {
            trace_.rounds_used = round;
            progress_ = false;

            phase_instantiate();
            if (phase_verify()) break;
            phase_iterate();
            if (phase_verify()) break;
            phase_rewrite();
            if (phase_verify()) break;
            phase_shift_difference();
            if (phase_verify()) break;

            if (!progress_) break;
        }
        trace_.facts_total = static_cast<int>(kb_.facts.size());
        if (trace_.outcome != DerivationTrace::Outcome::Verified)
            trace_.outcome = tried_.empty() ? DerivationTrace::Outcome::Exhausted
                                            : DerivationTrace::Outcome::CandidateUnverified;
        return trace_;
    }

    // Re-executes a recorded trace step by step, failing loudly at the
    // first divergence. Returns the rebuilt knowledge base.
    KnowledgeBase replay(const DerivationTrace& t) {
        recording_ = false;
        seed_axiom();
        for (size_t i = 0; i < t.steps.size(); ++i) {
            const TraceStep& s = t.steps[i];
            try {
                apply_step(s);
            } catch (const FeError& e) {
                throw FeError(FeError::Code::Internal,
                              "replay mismatch at step " + std::to_string(i) + ": " + e.what());
            }
        }
        return kb_;
    }

    const KnowledgeBase& kb() const { return kb_; }

private:
    // ---- insertion and scans ----

    // Joint positive content normalization keeps displayed facts tidy and
    // makes keys scale-free on both sides.
    static void content_normalize(Fact& f) {
        auto [cl, l] = rational_content(f.lhs);
        auto [cr, r] = rational_content(f.rhs);
        if (cl == 0 || cr == 0) return;
        BigInt gn = boost::multiprecision::gcd(num(cl) * den(cr), num(cr) * den(cl));
        BigInt gd = den(cl) * den(cr);
        Rational k(gn, gd);
        if (k == 0 || k == 1) return;
        f.lhs = f.lhs.scaled(Rational(1) / k);
        f.rhs = f.rhs.scaled(Rational(1) / k);
    }

    bool should_pause() const {
        return budget_hit_ || kb_.candidates.size() > tried_.size();
    }

    std::optional<int> insert_fact(Fact fact, const std::string& move, std::vector<int> inputs,
                                   const std::string& args) {
        if (budget_hit_) return std::nullopt;
        content_normalize(fact);
        if (fact.trivial()) return std::nullopt;
        std::string key = fact_key(fact);
        auto it = kb_.by_key.find(key);
        if (it != kb_.by_key.end()) {
            // Weaker bounds win: fewer tails/conditions replace the stored copy.
            Fact& old = kb_.facts[it->second];
            size_t oldw = old.tail_bounds.size() + old.side_conditions.size();
            size_t neww = fact.tail_bounds.size() + fact.side_conditions.size();
            if (neww < oldw) {
                old.tail_bounds = fact.tail_bounds;
                old.side_conditions = fact.side_conditions;
            }
            return std::nullopt;
        }
        if (static_cast<int>(kb_.facts.size()) >= budget_.max_facts) {
            budget_hit_ = true;
            return std::nullopt;
        }
        int id = static_cast<int>(kb_.facts.size());
        fact.provenance.move = move;
        fact.provenance.parents = inputs;
        kb_.facts.push_back(fact);
        kb_.by_key[key] = id;
        progress_ = true;

        if (recording_) {
            TraceStep st;
            st.move = move;
            st.inputs = std::move(inputs);
            st.args = args;
            st.output = id;
            st.output_key = key;
            for (const auto& sc : kb_.facts[id].side_conditions)
                st.side_conditions.push_back(sc.str());
            trace_.steps.push_back(st);
        }
        register_scans(id);
        return id;
    }

    void register_candidate(CandidateFamily fam, int source) {
        std::string key = search_detail::family_key(fam);
        for (const auto& c : kb_.candidates)
            if (c.key == key) return;
        kb_.candidates.push_back({std::move(fam), source, key});
        progress_ = true;
        if (recording_) {
            TraceStep st;
            st.move = "candidate";
            st.inputs = {source};
            st.output = static_cast<int>(kb_.candidates.size()) - 1;
            st.output_key = key;
            trace_.steps.push_back(st);
        }
    }

    // Registry scans run on every inserted fact, in a fixed order, in both
    // derive and replay. They only register; follow-up insertions
    // (cross_swap, factor cancellation) are separate recorded moves.
    void register_scans(int id) {
        const Fact& f = kb_.facts[id];

        if (auto pv = point_scan(f)) {
            std::string key = render(pv->point) + "=" + render(pv->value);
            bool seen = false;
            for (const auto& e : kb_.points) seen |= e.key == key;
            if (!seen) kb_.points.push_back({*pv, id, key});
        }
        for (auto shift : {cde_scan(f), iteration_lemma(f)}) {
            if (!shift) continue;
            shift->source_fact = id;
            std::string key = search_detail::shift_key(*shift);
            bool seen = false;
            for (const auto& e : kb_.shifts) seen |= e.key == key;
            if (!seen) kb_.shifts.push_back({*shift, id, key});
        }
        if (auto k = homogeneity_scan(f)) {
            bool seen = false;
            for (const auto& e : kb_.scalings) seen |= e.k == *k;
            if (!seen) kb_.scalings.push_back({*k, id});
        }
        if (auto ps = kfold_iteration(f, p_.domain, fresh_)) {
            ps->source_fact = id;
            std::string key = render(ps->a_expr) + "/" + render(ps->b_expr) + ":" + ps->base_var;
            bool seen = false;
            for (const auto& e : kb_.pshifts) seen |= e.key == key;
            if (!seen) {
                kb_.pshifts.push_back({*ps, id, key});
                pending_cross_.push_back(static_cast<int>(kb_.pshifts.size()) - 1);
            }
        }
        if (auto fam = proportionality_scan(f, fresh_)) register_candidate(*fam, id);
        if (auto fam = extract_solved_form(f, fresh_)) register_candidate(*fam, id);
        if (auto fam = bounded_additive_linear(f, p_.codomain, fresh_)) register_candidate(*fam, id);
        if (auto fam = jensen(f, fresh_, p_.codomain)) register_candidate(*fam, id);

        pending_cancel_.push_back(id);

        // In derive mode the pending queues become recorded moves at once;
        // replay performs them from the trace instead.
        if (recording_) drain_pending();
    }

    void drain_pending() {
        while (!pending_cross_.empty() || !pending_cancel_.empty()) {
            if (!pending_cross_.empty()) {
                int pi = pending_cross_.front();
                pending_cross_.erase(pending_cross_.begin());
                const auto& entry = kb_.pshifts[pi];
                Fact cross = cross_swap(entry.s, p_.domain, ctx_);
                inherit_conditions(cross, entry.source);
                insert_fact(cross, "cross_swap", {entry.source}, "pshift#" + std::to_string(pi));
                continue;
            }
            int id = pending_cancel_.front();
            pending_cancel_.erase(pending_cancel_.begin());
            try_cancel_factor(id);
        }
    }

    void inherit_conditions(Fact& f, int source) {
        for (const auto& sc : kb_.facts[source].side_conditions) f.add_condition(sc);
    }

    // Divides a fact's difference by an evidently positive ground shift
    // constant when the division is exact (the paper's "divide by 2A").
    void try_cancel_factor(int id) {
        Poly diff = kb_.facts[id].diff();
        for (size_t i = 0; i < kb_.shifts.size(); ++i) {
            const Poly& c = kb_.shifts[i].s.shift;
            if (!kb_.shifts[i].s.parameters.empty()) continue;
            if (!free_variables(c).empty()) continue;
            if (c.as_constant()) continue;
            if (!evidently_positive(c, ctx_)) continue;
            auto q = exact_div(diff, c);
            if (!q || q->is_zero()) continue;
            Fact out = split_fact(*q, kb_.facts[id]);
            inherit_conditions(out, id);
            insert_fact(out, "cancel_factor", {id}, "shift#" + std::to_string(i));
            return;
        }
    }

    // q = 0 presented with positive terms left.
    static Fact split_fact(const Poly& q, const Fact& parent) {
        Fact out;
        for (const auto& [m, c] : q.terms())
            (c > 0 ? out.lhs : out.rhs).add_term(m, c > 0 ? c : -c);
        for (const auto& [v, d] : parent.quantified)
            if (contains_variable(q, v)) out.quantified.emplace_back(v, d);
        out.tail_bounds = parent.tail_bounds;
        out.side_conditions = parent.side_conditions;
        return out;
    }

    void seed_axiom() {
        kb_ = {};
        budget_hit_ = false;
        progress_ = false;
        tried_.clear();
        pool_version_.clear();
        iterated_.clear();
        pending_cross_.clear();
        pending_cancel_.clear();
        fresh_ = {};
        fresh_.used.insert("f");
        for (const auto& [n, d] : p_.parameters) fresh_.used.insert(n);
        for (const auto& [n, d] : p_.equation.quantified) fresh_.used.insert(n);
        insert_fact(p_.equation, "axiom", {}, p_.id);
    }

    // ---- pool instantiation ----

    struct PoolEntry {
        std::string label;
        bool is_scaling = false;
        Expr value;       // ground value or unused for scaling
        Rational factor;  // scaling factor
    };

    std::vector<PoolEntry> pool() const {
        std::vector<PoolEntry> out;
        for (long long v : {0LL, 1LL, -1LL, 2LL, -2LL}) {
            if (domain_contains(p_.domain, Rational(v)))
                out.push_back({std::to_string(v), false, Expr::integer(v), {}});
        }
        for (const auto& pt : kb_.points)
            out.push_back({"pt:" + pt.key, false, to_expr(pt.p.point), {}});
        for (const auto& sc : kb_.scalings)
            out.push_back({"scale:" + rat_str(sc.k), true, Expr::integer(0), sc.k});
        return out;
    }

    void phase_instantiate() {
        auto entries = pool();
        int version = static_cast<int>(entries.size());
        size_t nfacts = kb_.facts.size();
        for (size_t id = 0; id < nfacts && !should_pause(); ++id) {
            if (pool_version_.count(static_cast<int>(id)) &&
                pool_version_[static_cast<int>(id)] >= version)
                continue;
            const Fact fact = kb_.facts[id];  // copy: kb_ grows below
            size_t nvars = fact.quantified.size();
            // Instantiating instantiations cascades quadratically and adds
            // nothing the pair pool on the parent does not already cover.
            if (nvars == 0 || nvars > 3 || fact.provenance.move == "instantiate") {
                pool_version_[static_cast<int>(id)] = version;
                continue;
            }

            // Cartesian product over per-variable choices (free slot last).
            std::vector<size_t> idx(nvars, 0);
            size_t options = entries.size() + 1;  // + free
            while (true) {
                Bindings b;
                std::string label;
                for (size_t vi = 0; vi < nvars; ++vi) {
                    if (idx[vi] == entries.size()) continue;  // free
                    const auto& e = entries[idx[vi]];
                    const std::string& var = fact.quantified[vi].first;
                    b[var] = e.is_scaling
                                 ? Expr::rational(e.factor) * Expr::variable(var)
                                 : e.value;
                }
                if (!b.empty()) {
                    Fact inst = instantiate(fact, b, ctx_);
                    insert_fact(inst, "instantiate", {static_cast<int>(id)},
                                search_detail::bindings_str(b));
                    if (should_pause()) return;  // resumed next round
                }
                size_t vi = 0;
                while (vi < nvars && ++idx[vi] == options) idx[vi++] = 0;
                if (vi == nvars) break;
            }

            // Variable swap and merge for multi-variable facts.
            if (nvars >= 2) {
                const std::string& a = fact.quantified[0].first;
                const std::string& bn = fact.quantified[1].first;
                Bindings swap{{a, Expr::variable(bn)}, {bn, Expr::variable(a)}};
                insert_fact(instantiate(fact, swap, ctx_), "instantiate",
                            {static_cast<int>(id)}, search_detail::bindings_str(swap));
                Bindings merge{{a, Expr::variable(bn)}};
                insert_fact(instantiate(fact, merge, ctx_), "instantiate",
                            {static_cast<int>(id)}, search_detail::bindings_str(merge));
                if (should_pause()) return;
            }
            pool_version_[static_cast<int>(id)] = version;
        }
    }

    // ---- iteration substitution ----

    void phase_iterate() {
        size_t nfacts = kb_.facts.size();
        for (size_t id = 0; id < nfacts && !should_pause(); ++id) {
            if (iterated_.count(static_cast<int>(id))) continue;
            const Fact fact = kb_.facts[id];
            if (fact.lhs.size() != 1 || depth(fact.lhs) > 2) continue;
            const auto& [m, c] = *fact.lhs.terms().begin();
            if (c != 1 || m.factors.size() != 1 || m.factors[0].second != 1 ||
                m.factors[0].first.kind != Atom::Kind::FApply)
                continue;
            const Poly& arg = *m.factors[0].first.arg;
            for (const auto& [x, dom] : fact.quantified) {
                Poly fx = Poly::from_atom(
                    Atom::fapply(std::make_shared<const Poly>(Poly::from_atom(Atom::variable(x)))));
                if (arg.coeff(fx.terms().begin()->first) != 1) continue;
                // x -> arg with the other quantified variables renamed fresh.
                Bindings rename;
                for (const auto& [v, vd] : fact.quantified)
                    if (v != x) rename[v] = Expr::variable(fresh_var(v));
                Poly image = substitute(to_expr(arg), rename);
                Bindings b{{x, to_expr(image)}};
                iterated_.insert(static_cast<int>(id));
                insert_fact(instantiate(fact, b, ctx_), "iterate", {static_cast<int>(id)},
                            search_detail::bindings_str(b));
                break;
            }
        }
    }

    std::string fresh_var(const std::string& base) {
        for (const char* cand : {"z", "w", "u", "v"}) {
            if (!fresh_.used.count(cand)) {
                fresh_.used.insert(cand);
                return cand;
            }
        }
        return fresh_.next(base);
    }

    // ---- rewriting ----

    std::vector<int> rule_facts() const {
        std::vector<int> out;
        for (size_t id = 0; id < kb_.facts.size(); ++id) {
            const Fact& f = kb_.facts[id];
            if (f.lhs.size() != 1) continue;
            const auto& [m, c] = *f.lhs.terms().begin();
            if (c != 1 || m.factors.size() != 1 || m.factors[0].second != 1 ||
                m.factors[0].first.kind != Atom::Kind::FApply)
                continue;
            if (depth(f.lhs) <= depth(f.rhs)) continue;
            out.push_back(static_cast<int>(id));
        }
        return out;
    }

    void phase_rewrite() {
        // Worklist over ids; facts inserted during the phase are processed
        // in the same round. The rule list is snapshotted per phase.
        std::vector<int> rules = rule_facts();
        for (size_t id = 0; id < kb_.facts.size() && !should_pause(); ++id) {
            const Fact fact = kb_.facts[id];
            if (!contains_f(fact.lhs) && !contains_f(fact.rhs)) continue;

            for (size_t i = 0; i < kb_.points.size(); ++i) {
                Fact rule;
                rule.lhs = Poly::from_atom(
                    Atom::fapply(std::make_shared<const Poly>(kb_.points[i].p.point)));
                rule.rhs = kb_.points[i].p.value;
                if (auto out = try_rewrite_with(rule, fact, Direction::LeftToRight, ctx_)) {
                    inherit_conditions(*out, kb_.points[i].source);
                    insert_fact(*out, "rewrite", {static_cast<int>(id)},
                                "point#" + std::to_string(i));
                }
            }
            for (size_t i = 0; i < kb_.scalings.size(); ++i) {
                if (auto out = try_homogeneity_rewrite(fact, kb_.scalings[i].k)) {
                    inherit_conditions(*out, kb_.scalings[i].source);
                    insert_fact(*out, "homogeneity", {static_cast<int>(id)},
                                "scaling#" + std::to_string(i));
                }
            }
            for (size_t i = 0; i < kb_.shifts.size(); ++i) {
                const auto& entry = kb_.shifts[i];
                if (entry.source == static_cast<int>(id)) continue;
                std::optional<Fact> out;
                if (entry.s.parameters.empty())
                    out = try_shift_peel(fact, entry.s, p_.domain, ctx_);
                else
                    out = try_rewrite_with(shift_to_fact(entry.s, p_.domain), fact,
                                           Direction::LeftToRight, ctx_);
                if (out) {
                    inherit_conditions(*out, entry.source);
                    insert_fact(*out, "shift_rewrite", {static_cast<int>(id)},
                                "shift#" + std::to_string(i));
                }
            }
            for (int rid : rules) {
                if (rid == static_cast<int>(id)) continue;
                if (auto out =
                        try_rewrite_with(kb_.facts[rid], fact, Direction::LeftToRight, ctx_)) {
                    if (depth(out->diff()) > depth(fact.diff())) continue;
                    insert_fact(*out, "rewrite", {static_cast<int>(id), rid},
                                "rulefact#" + std::to_string(rid));
                }
            }
        }
    }

    // ---- shift differences on the axiom ----

    void phase_shift_difference() {
        size_t nshifts = kb_.shifts.size();
        for (size_t i = 0; i < nshifts && !should_pause(); ++i) {
            const auto& entry = kb_.shifts[i];
            if (!entry.s.parameters.empty()) continue;
            for (const auto& [v, d] : p_.equation.quantified) {
                Fact sd = shift_difference(kb_.facts[0], v, to_expr(entry.s.shift), ctx_);
                inherit_conditions(sd, entry.source);
                insert_fact(sd, "shift_difference", {0},
                            "var " + v + "; shift#" + std::to_string(i));
            }
        }
    }

    // ---- verification ----

    bool phase_verify() {
        for (size_t ci = 0; ci < kb_.candidates.size(); ++ci) {
            if (tried_.count(static_cast<int>(ci))) continue;
            tried_.insert(static_cast<int>(ci));
            ConstraintSet solved =
                solve_constraints(substitute_candidate(p_, kb_.candidates[ci].family));
            std::string summary = verdict_summary(solved);
            if (recording_) {
                TraceStep st;
                st.move = "verify";
                st.inputs = {kb_.candidates[ci].source};
                st.args = "candidate#" + std::to_string(ci);
                st.output = static_cast<int>(ci);
                st.output_key = summary;
                trace_.steps.push_back(st);
            }
            if (solved.status == ConstraintSet::Status::Satisfiable ||
                solved.status == ConstraintSet::Status::Residual) {
                finish_verified(ci, solved);
                return true;
            }
        }
        return false;
    }

    static std::string verdict_summary(const ConstraintSet& cs) {
        std::string out = ConstraintSet::status_str(cs.status);
        for (const auto& b : cs.branches) {
            out += " {";
            for (const auto& [p, v] : b.assignment) out += p + "=" + rat_str(v) + " ";
            for (const auto& r : b.residual) out += "[" + ConstraintSet::equation_str(r) + "] ";
            out += "}";
        }
        return out;
    }

    void finish_verified(size_t ci, const ConstraintSet& solved) {
        trace_.outcome = DerivationTrace::Outcome::Verified;
        trace_.solutions.clear();
        for (const auto& b : solved.branches) {
            SolutionEntry e;
            e.family = kb_.candidates[ci].family.assigned(b.assignment);
            for (const auto& r : b.residual)
                e.conditions.push_back(ConstraintSet::equation_str(r));
            trace_.solutions.push_back(std::move(e));
        }
        std::set<std::string> seen;
        for (const auto& sc : kb_.facts[kb_.candidates[ci].source].side_conditions)
            if (seen.insert(sc.str()).second) trace_.assumptions.push_back(sc.str());
        for (const auto& sc : solved.conditions)
            if (seen.insert(sc.str()).second) trace_.assumptions.push_back(sc.str());
    }

    // ---- replay ----

    void apply_step(const TraceStep& s) {
        auto check = [&](std::optional<int> id) {
            if (s.move == "axiom") return;  // seeded
            if (!id && s.output >= 0)
                throw FeError(FeError::Code::Internal, "step produced nothing (expected " +
                                                           s.output_key + ")");
            if (id && fact_key(kb_.facts[*id]) != s.output_key)
                throw FeError(FeError::Code::Internal,
                              "produced " + fact_key(kb_.facts[*id]) + ", expected " +
                                  s.output_key);
            if (id && *id != s.output)
                throw FeError(FeError::Code::Internal, "fact id diverged");
        };
        auto input_fact = [&](size_t i) -> const Fact& {
            if (i >= s.inputs.size() || s.inputs[i] < 0 ||
                s.inputs[i] >= static_cast<int>(kb_.facts.size()))
                throw FeError(FeError::Code::Internal, "bad input reference");
            return kb_.facts[s.inputs[i]];
        };
        auto registry_index = [&](const std::string& prefix) {
            if (s.args.rfind(prefix, 0) != 0)
                throw FeError(FeError::Code::Internal, "bad args '" + s.args + "'");
            return std::stoul(s.args.substr(prefix.size()));
        };

        if (s.move == "axiom") {
            if (fact_key(kb_.facts[0]) != s.output_key)
                throw FeError(FeError::Code::Internal, "axiom key mismatch");
        } else if (s.move == "instantiate" || s.move == "iterate") {
            Bindings b = search_detail::parse_bindings(s.args, p_);
            check(insert_fact(instantiate(input_fact(0), b, ctx_), s.move, s.inputs, s.args));
        } else if (s.move == "rewrite") {
            std::optional<Fact> out;
            if (s.args.rfind("point#", 0) == 0) {
                size_t i = registry_index("point#");
                if (i >= kb_.points.size())
                    throw FeError(FeError::Code::Internal, "unknown point registry entry");
                Fact rule;
                rule.lhs = Poly::from_atom(
                    Atom::fapply(std::make_shared<const Poly>(kb_.points[i].p.point)));
                rule.rhs = kb_.points[i].p.value;
                out = try_rewrite_with(rule, input_fact(0), Direction::LeftToRight, ctx_);
                if (out) inherit_conditions(*out, kb_.points[i].source);
            } else {
                size_t rid = registry_index("rulefact#");
                out = try_rewrite_with(kb_.facts[rid], input_fact(0), Direction::LeftToRight,
                                       ctx_);
            }
            if (!out) throw FeError(FeError::Code::Internal, "rewrite no longer applies");
            check(insert_fact(*out, s.move, s.inputs, s.args));
        } else if (s.move == "homogeneity") {
            size_t i = registry_index("scaling#");
            if (i >= kb_.scalings.size())
                throw FeError(FeError::Code::Internal, "unknown scaling registry entry");
            auto out = try_homogeneity_rewrite(input_fact(0), kb_.scalings[i].k);
            if (!out) throw FeError(FeError::Code::Internal, "homogeneity no longer applies");
            inherit_conditions(*out, kb_.scalings[i].source);
            check(insert_fact(*out, s.move, s.inputs, s.args));
        } else if (s.move == "shift_rewrite") {
            size_t i = registry_index("shift#");
            if (i >= kb_.shifts.size())
                throw FeError(FeError::Code::Internal, "unknown shift registry entry");
            const auto& entry = kb_.shifts[i];
            std::optional<Fact> out;
            if (entry.s.parameters.empty())
                out = try_shift_peel(input_fact(0), entry.s, p_.domain, ctx_);
            else
                out = try_rewrite_with(shift_to_fact(entry.s, p_.domain), input_fact(0),
                                       Direction::LeftToRight, ctx_);
            if (!out) throw FeError(FeError::Code::Internal, "shift rewrite no longer applies");
            inherit_conditions(*out, entry.source);
            check(insert_fact(*out, s.move, s.inputs, s.args));
        } else if (s.move == "shift_difference") {
            size_t pos = s.args.find("; shift#");
            if (s.args.rfind("var ", 0) != 0 || pos == std::string::npos)
                throw FeError(FeError::Code::Internal, "bad args '" + s.args + "'");
            std::string var = s.args.substr(4, pos - 4);
            size_t i = std::stoul(s.args.substr(pos + 8));
            if (i >= kb_.shifts.size())
                throw FeError(FeError::Code::Internal, "unknown shift registry entry");
            Fact sd = shift_difference(kb_.facts[0], var, to_expr(kb_.shifts[i].s.shift), ctx_);
            inherit_conditions(sd, kb_.shifts[i].source);
            check(insert_fact(sd, s.move, s.inputs, s.args));
        } else if (s.move == "cross_swap") {
            size_t i = registry_index("pshift#");
            if (i >= kb_.pshifts.size())
                throw FeError(FeError::Code::Internal, "unknown pshift registry entry");
            Fact cross = cross_swap(kb_.pshifts[i].s, p_.domain, ctx_);
            inherit_conditions(cross, kb_.pshifts[i].source);
            check(insert_fact(cross, s.move, s.inputs, s.args));
        } else if (s.move == "cancel_factor") {
            size_t i = registry_index("shift#");
            auto q = exact_div(input_fact(0).diff(), kb_.shifts[i].s.shift);
            if (!q) throw FeError(FeError::Code::Internal, "division no longer exact");
            Fact out = split_fact(*q, input_fact(0));
            inherit_conditions(out, s.inputs[0]);
            check(insert_fact(out, s.move, s.inputs, s.args));
        } else if (s.move == "candidate") {
            if (s.output >= static_cast<int>(kb_.candidates.size()) ||
                kb_.candidates[s.output].key != s.output_key)
                throw FeError(FeError::Code::Internal, "candidate registry diverged");
        } else if (s.move == "verify") {
            size_t ci = registry_index("candidate#");
            if (ci >= kb_.candidates.size())
                throw FeError(FeError::Code::Internal, "unknown candidate");
            ConstraintSet solved =
                solve_constraints(substitute_candidate(p_, kb_.candidates[ci].family));
            if (verdict_summary(solved) != s.output_key)
                throw FeError(FeError::Code::Internal, "verification verdict diverged");
        } else {
            throw FeError(FeError::Code::Internal, "unknown move '" + s.move + "'");
        }
    }

    const ProblemSpec& p_;
    Budget budget_;
    DomainCtx ctx_;
    KnowledgeBase kb_;
    DerivationTrace trace_;
    FreshNames fresh_;
    bool recording_ = true;
    bool budget_hit_ = false;
    bool progress_ = false;
    std::set<int> tried_;
    std::map<int, int> pool_version_;
    std::set<int> iterated_;
    std::vector<int> pending_cross_;
    std::vector<int> pending_cancel_;
};

inline DerivationTrace derive(const ProblemSpec& p, Budget budget = {}) {
    Engine e(p, budget);
    return e.derive();
}

inline KnowledgeBase replay(const DerivationTrace& t, const ProblemSpec& p,
                            Budget budget = {}) {
    Engine e(p, budget);
    return e.replay(t);
}

}  // namespace fe
