#pragma once

// Brute-force ground truth: explicit extended preference graphs, bit-packed
// dominance closures, exhaustive SAT and two-block QBF evaluation, and
// verifiers for the reduction lemmas. Nothing here uses the search engine
// except where a verifier's instance is too large for an explicit closure.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cpnet/errors.hpp"
#include "cpnet/formula.hpp"
#include "cpnet/gadgets.hpp"
#include "cpnet/model.hpp"
#include "cpnet/semantics.hpp"
#include "cpnet/voting.hpp"

namespace cpnet::oracle {

struct OracleLimits {
    std::size_t max_features = 14;   // explicit graphs and closures
    std::size_t max_variables = 24;  // SAT / QBF enumeration
    std::size_t max_states = std::size_t{1} << 24;  // engine fallback in verifiers
};

// Vertex u is the outcome whose bit f is feature f. Out-edges in CSR form.
struct ExtendedPreferenceGraph {
    std::size_t features = 0;
    std::vector<std::uint32_t> offsets;  // size vertex_count() + 1
    std::vector<std::uint32_t> targets;

    std::size_t vertex_count() const noexcept { return offsets.empty() ? 0 : offsets.size() - 1; }
    std::size_t edge_count() const noexcept { return targets.size(); }
    std::size_t out_degree(std::uint32_t u) const { return offsets[u + 1] - offsets[u]; }

    template <class F>
    void for_each_successor(std::uint32_t u, F&& f) const {
        for (auto i = offsets[u]; i < offsets[u + 1]; ++i) f(targets[i]);
    }

    bool has_edge(std::uint32_t u, std::uint32_t v) const {
        for (auto i = offsets[u]; i < offsets[u + 1]; ++i) {
            if (targets[i] == v) return true;
        }
        return false;
    }

    std::uint32_t vertex(const Outcome& o) const { return static_cast<std::uint32_t>(o.packed()); }
    Outcome outcome(std::uint32_t u) const { return Outcome::from_packed(u, features); }

    // Sorted (from, to) pairs.
    std::vector<std::pair<Outcome, Outcome>> edge_list() const {
        std::vector<std::pair<Outcome, Outcome>> out;
        for (std::uint32_t u = 0; u < vertex_count(); ++u) {
            for_each_successor(u, [&](std::uint32_t v) { out.emplace_back(outcome(u), outcome(v)); });
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

inline void require_oracle_size(std::size_t n, std::size_t bound) {
    if (n > bound) {
        throw InstanceTooLarge("oracle: " + std::to_string(n) + " features exceed the bound of " +
                               std::to_string(bound));
    }
}

// Flip of f at u is improving iff the table row picked by u's parent values
// ranks the opposite of u[f] first. Rows are read straight from the table.
inline ExtendedPreferenceGraph build_graph(const CPNet& net, std::size_t bound = 14) {
    const std::size_t n = net.feature_count();
    require_oracle_size(n, bound);
    auto report = validate_net(net);
    if (!report.ok()) throw InvalidInput("oracle: invalid CP-net: " + report.summary());
    ExtendedPreferenceGraph g;
    g.features = n;
    const std::uint32_t vertices = std::uint32_t{1} << n;
    g.offsets.assign(vertices + 1, 0);
    for (std::uint32_t u = 0; u < vertices; ++u) {
        for (std::size_t f = 0; f < n; ++f) {
            const auto& t = net.table(f);
            std::size_t row = 0;
            for (std::size_t k = 0; k < t.parents.size(); ++k) {
                if ((u >> t.parents[k]) & 1U) row |= std::size_t{1} << k;
            }
            const unsigned current = (u >> f) & 1U;
            const unsigned best = t.preferred[row] == Value::One ? 1U : 0U;
            if (current != best) g.targets.push_back(u ^ (std::uint32_t{1} << f));
        }
        g.offsets[u + 1] = static_cast<std::uint32_t>(g.targets.size());
    }
    return g;
}

// Kahn's algorithm over all vertices; empty when the graph has a cycle.
inline std::optional<std::vector<std::uint32_t>> topological_vertices(const ExtendedPreferenceGraph& g) {
    const std::size_t v = g.vertex_count();
    std::vector<std::uint32_t> indeg(v, 0);
    for (auto t : g.targets) ++indeg[t];
    std::vector<std::uint32_t> order;
    order.reserve(v);
    for (std::uint32_t u = 0; u < v; ++u) {
        if (indeg[u] == 0) order.push_back(u);
    }
    for (std::size_t head = 0; head < order.size(); ++head) {
        g.for_each_successor(order[head], [&](std::uint32_t w) {
            if (--indeg[w] == 0) order.push_back(w);
        });
    }
    if (order.size() != v) return std::nullopt;
    return order;
}

inline bool is_acyclic(const ExtendedPreferenceGraph& g) { return topological_vertices(g).has_value(); }

// Vertices without improving flips.
inline std::vector<Outcome> sinks(const ExtendedPreferenceGraph& g) {
    std::vector<Outcome> out;
    for (std::uint32_t u = 0; u < g.vertex_count(); ++u) {
        if (g.out_degree(u) == 0) out.push_back(g.outcome(u));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// reach(alpha, beta) <=> beta is reachable from alpha by at least one flip,
// i.e. beta dominates alpha. One bit row per vertex.
class DominanceClosure {
public:
    DominanceClosure() = default;
    explicit DominanceClosure(std::size_t features)
        : features_(features),
          vertices_(std::size_t{1} << features),
          words_((vertices_ + 63) / 64),
          bits_(vertices_ * words_, 0) {}

    std::size_t features() const noexcept { return features_; }
    std::size_t vertex_count() const noexcept { return vertices_; }

    bool reach(std::uint32_t from, std::uint32_t to) const {
        return (bits_[from * words_ + to / 64] >> (to % 64)) & 1U;
    }
    bool reach(const Outcome& from, const Outcome& to) const {
        return reach(static_cast<std::uint32_t>(from.packed()), static_cast<std::uint32_t>(to.packed()));
    }
    bool dominates(const Outcome& beta, const Outcome& alpha) const { return reach(alpha, beta); }

    void set(std::uint32_t from, std::uint32_t to) { bits_[from * words_ + to / 64] |= std::uint64_t{1} << (to % 64); }

    // row(from) |= row(other)
    void merge(std::uint32_t from, std::uint32_t other) {
        auto* dst = &bits_[from * words_];
        const auto* src = &bits_[other * words_];
        for (std::size_t w = 0; w < words_; ++w) dst[w] |= src[w];
    }

    std::size_t row_count(std::uint32_t from) const {
        std::size_t c = 0;
        for (std::size_t w = 0; w < words_; ++w) c += static_cast<std::size_t>(__builtin_popcountll(bits_[from * words_ + w]));
        return c;
    }

    std::size_t pair_count() const {
        std::size_t c = 0;
        for (auto w : bits_) c += static_cast<std::size_t>(__builtin_popcountll(w));
        return c;
    }

private:
    std::size_t features_ = 0;
    std::size_t vertices_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
};

// On a DAG each row is the union of the successors' rows plus the successors
// themselves, filled in reverse topological order. With a cycle, falls back
// to one breadth-first search per vertex.
inline DominanceClosure closure(const ExtendedPreferenceGraph& g) {
    DominanceClosure c(g.features);
    if (auto order = topological_vertices(g)) {
        for (auto it = order->rbegin(); it != order->rend(); ++it) {
            const std::uint32_t u = *it;
            g.for_each_successor(u, [&](std::uint32_t v) {
                c.set(u, v);
                c.merge(u, v);
            });
        }
        return c;
    }
    std::vector<std::uint32_t> queue;
    for (std::uint32_t s = 0; s < g.vertex_count(); ++s) {
        queue.clear();
        g.for_each_successor(s, [&](std::uint32_t v) {
            if (!c.reach(s, v)) {
                c.set(s, v);
                queue.push_back(v);
            }
        });
        for (std::size_t head = 0; head < queue.size(); ++head) {
            g.for_each_successor(queue[head], [&](std::uint32_t v) {
                if (!c.reach(s, v)) {
                    c.set(s, v);
                    queue.push_back(v);
                }
            });
        }
    }
    return c;
}

inline DominanceClosure closure(const CPNet& net, std::size_t bound = 14) { return closure(build_graph(net, bound)); }

// Vertex labels are outcome bitstrings in canonical feature order.
inline std::string to_dot(const ExtendedPreferenceGraph& g, std::string_view name = "epg") {
    std::ostringstream out;
    out << "digraph " << name << " {\n";
    for (std::uint32_t u = 0; u < g.vertex_count(); ++u) {
        out << "  \"" << g.outcome(u).to_string() << "\";\n";
    }
    for (const auto& [from, to] : g.edge_list()) {
        out << "  \"" << from.to_string() << "\" -> \"" << to.to_string() << "\";\n";
    }
    out << "}\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Boolean enumeration

inline bool sat_enumerate(const CnfFormula& phi, const PartialAssignment& sigma = {}, std::size_t bound = 24) {
    phi.validate();
    require_in_range(sigma, phi.num_vars);
    std::vector<std::size_t> free;
    for (std::size_t v = 0; v < phi.num_vars; ++v) {
        if (!sigma.count(v)) free.push_back(v);
    }
    if (free.size() > bound) throw InstanceTooLarge("sat_enumerate: too many free variables");
    std::vector<bool> values(phi.num_vars, false);
    for (const auto& [v, b] : sigma) values[v] = b;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << free.size()); ++bits) {
        for (std::size_t k = 0; k < free.size(); ++k) values[free[k]] = (bits >> k) & 1U;
        if (phi.satisfies(values)) return true;
    }
    return false;
}

// Validity of exists X forall Y not phi.
inline bool qbf2_enumerate(const Qbf2Formula& Phi, std::size_t bound = 24) {
    Phi.validate();
    if (Phi.exists_vars.size() + Phi.forall_vars.size() > bound) {
        throw InstanceTooLarge("qbf2_enumerate: too many variables");
    }
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << Phi.exists_vars.size()); ++x) {
        PartialAssignment sigma;
        for (std::size_t k = 0; k < Phi.exists_vars.size(); ++k) sigma[Phi.exists_vars[k]] = (x >> k) & 1U;
        if (!sat_enumerate(Phi.matrix, sigma, bound)) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Lemma verifiers

struct LemmaReport {
    std::string tag;
    bool pass = true;
    std::size_t checked = 0;     // number of equivalences evaluated
    std::string method;          // "closure" or "search"
    std::string message;         // first failure, empty on pass
    std::optional<Outcome> beta;   // offending pair, when there is one
    std::optional<Outcome> alpha;
};

using LemmaInstance = std::variant<CnfFormula, MCPNet>;

inline const std::vector<std::string_view>& lemma_tags() {
    static const std::vector<std::string_view> tags{"corollary1", "lemma1",  "corollary2",   "lemma3",
                                                    "lemma5",     "lemma7", "theorem_nowin"};
    return tags;
}

namespace detail {

inline std::string describe(const PartialAssignment& sigma) {
    std::string s = "{";
    for (const auto& [v, b] : sigma) {
        if (s.size() > 1) s += ",";
        s += "x" + std::to_string(v + 1) + "=" + (b ? "T" : "F");
    }
    return s + "}";
}

// All 3^n partial assignments, each variable cycling undefined, true, false.
inline std::vector<PartialAssignment> partial_assignments(std::size_t n) {
    std::vector<PartialAssignment> out{{}};
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<PartialAssignment> next;
        for (const auto& s : out) {
            next.push_back(s);
            auto t = s;
            t[v] = true;
            next.push_back(t);
            t[v] = false;
            next.push_back(t);
        }
        out = std::move(next);
    }
    return out;
}

// Dominance in one net, by closure when small enough, else by search.
class DominanceProbe {
public:
    DominanceProbe(const CPNet& net, const OracleLimits& limits) : net_(net), limits_(limits) {
        if (net.feature_count() <= limits.max_features) closure_ = closure(net, limits.max_features);
    }

    bool dominates(const Outcome& beta, const Outcome& alpha) const {
        if (alpha == beta) return false;
        if (closure_) return closure_->dominates(beta, alpha);
        return cpnet::dominates(net_, beta, alpha, {limits_.max_states}).holds;
    }

    const char* method() const { return closure_ ? "closure" : "search"; }

private:
    const CPNet& net_;
    OracleLimits limits_;
    std::optional<DominanceClosure> closure_;
};

inline void fail(LemmaReport& r, std::string message, const Outcome& beta, const Outcome& alpha) {
    if (!r.pass) return;
    r.pass = false;
    r.message = std::move(message);
    r.beta = beta;
    r.alpha = alpha;
}

// Both bullets of a satisfiability/dominance equivalence for one pair.
inline void check_pair(LemmaReport& r, const DominanceProbe& probe, const Outcome& beta, const Outcome& alpha,
                       bool sat, const std::string& context) {
    const bool forward = probe.dominates(beta, alpha);
    const bool backward = probe.dominates(alpha, beta);
    ++r.checked;
    if (forward != sat) {
        fail(r, context + (sat ? ": satisfiable but beta does not dominate alpha"
                               : ": unsatisfiable but beta dominates alpha"),
             beta, alpha);
    } else if ((!forward && !backward) != !sat) {
        fail(r, context + ": incomparability does not match unsatisfiability", beta, alpha);
    }
}

inline LemmaReport verify_formula_net(const CnfFormula& phi, bool partial, const OracleLimits& limits) {
    LemmaReport r;
    r.tag = partial ? "lemma1" : "corollary1";
    auto f = formula_net(phi);
    DominanceProbe probe(f.net, limits);
    r.method = probe.method();
    const Outcome beta = f.beta_bar();
    const auto sigmas = partial ? partial_assignments(phi.num_vars) : std::vector<PartialAssignment>{{}};
    for (const auto& sigma : sigmas) {
        const Outcome alpha = encode_assignment(sigma, f.layout, f.net.feature_count());
        check_pair(r, probe, beta, alpha, sat_enumerate(phi, sigma, limits.max_variables),
                   "sigma=" + describe(sigma));
        if (!r.pass) break;
    }
    return r;
}

inline LemmaReport verify_summarized(const CnfFormula& phi, bool partial, const OracleLimits& limits) {
    LemmaReport r;
    r.tag = partial ? "lemma3" : "corollary2";
    auto s = summarized_formula_net(phi);
    DominanceProbe probe(s.net, limits);
    r.method = probe.method();
    const auto sigmas = partial ? partial_assignments(phi.num_vars) : std::vector<PartialAssignment>{{}};
    // beta_bar may carry any values on the variable features; enumerate them
    // as raw bit patterns.
    const auto vars = s.layout.formula.variable_features();
    const std::uint64_t patterns = partial ? (std::uint64_t{1} << vars.size()) : 1;
    for (const auto& sigma : sigmas) {
        const Outcome alpha = s.alpha_sigma(sigma);
        const bool sat = sat_enumerate(phi, sigma, limits.max_variables);
        for (std::uint64_t p = 0; p < patterns && r.pass; ++p) {
            Outcome beta = s.beta_bar();
            for (std::size_t k = 0; k < vars.size(); ++k) beta.set(vars[k], to_value((p >> k) & 1U));
            check_pair(r, probe, beta, alpha, sat, "sigma=" + describe(sigma));
        }
        if (!r.pass) break;
    }
    return r;
}

inline LemmaReport verify_ipo(const CnfFormula& phi, const OracleLimits& limits) {
    LemmaReport r;
    r.tag = "lemma5";
    r.method = "search";
    auto p = m_ipo(phi);
    const bool sat = sat_enumerate(phi, {}, limits.max_variables);
    VotingLimits vl;
    vl.max_states = limits.max_states;
    const bool optimal = is_pareto_optimal(p.profile, p.alpha(), vl);
    ++r.checked;
    if (optimal == sat) {
        r.pass = false;
        r.message = sat ? "satisfiable but the all-zeros outcome is Pareto optimal"
                        : "unsatisfiable but the all-zeros outcome is not Pareto optimal";
        r.alpha = p.alpha();
    }
    return r;
}

// The profile has a Pareto optimum iff all agent optima coincide, and then
// it is that common optimum. Both sides computed from explicit closures.
inline LemmaReport verify_same_optimum(const MCPNet& m, const OracleLimits& limits) {
    LemmaReport r;
    r.tag = "lemma7";
    r.method = "closure";
    if (!validate_profile(m).ok()) throw InvalidInput("oracle: invalid mCP-net: " + validate_profile(m).summary());
    const std::size_t n = m.feature_count();
    require_oracle_size(n, limits.max_features);
    std::vector<DominanceClosure> closures;
    std::vector<Outcome> optima;
    for (const auto& net : m.agents()) {
        auto g = build_graph(net, limits.max_features);
        auto top = sinks(g);
        if (top.size() != 1) throw InvalidInput("oracle: agent net does not have a unique optimum");
        optima.push_back(top.front());
        closures.push_back(closure(g));
    }
    bool same = true;
    for (const auto& o : optima) same = same && o == optima.front();
    // Definition-level Pareto optimum: dominates every other outcome in every net.
    std::optional<Outcome> pareto_optimum;
    const std::uint32_t vertices = std::uint32_t{1} << n;
    for (std::uint32_t a = 0; a < vertices && !pareto_optimum; ++a) {
        bool all = true;
        for (const auto& c : closures) all = all && c.row_count(a) == 0;
        if (!all) continue;
        bool beats_all = true;
        for (std::uint32_t b = 0; b < vertices && beats_all; ++b) {
            if (b == a) continue;
            for (const auto& c : closures) {
                if (!c.reach(b, a)) {
                    beats_all = false;
                    break;
                }
            }
        }
        if (beats_all) pareto_optimum = Outcome::from_packed(a, n);
    }
    ++r.checked;
    if (pareto_optimum.has_value() != same) {
        r.pass = false;
        r.message = same ? "agent optima coincide but no Pareto optimum exists"
                         : "a Pareto optimum exists although agent optima differ";
        r.alpha = pareto_optimum ? *pareto_optimum : optima.front();
    } else if (pareto_optimum && !(*pareto_optimum == optima.front())) {
        r.pass = false;
        r.message = "Pareto optimum differs from the common agent optimum";
        r.alpha = *pareto_optimum;
        r.beta = optima.front();
    }
    return r;
}

// Every outcome is majority dominated by some other outcome, so the profile
// has neither a majority optimal nor a majority optimum outcome.
inline LemmaReport verify_no_winner(const MCPNet& m, const OracleLimits& limits) {
    LemmaReport r;
    r.tag = "theorem_nowin";
    r.method = "closure";
    if (!validate_profile(m).ok()) throw InvalidInput("oracle: invalid mCP-net: " + validate_profile(m).summary());
    const std::size_t n = m.feature_count();
    require_oracle_size(n, limits.max_features);
    std::vector<DominanceClosure> closures;
    for (const auto& net : m.agents()) closures.push_back(closure(net, limits.max_features));
    const std::size_t t = m.agent_count() / 2 + 1;
    const std::uint32_t vertices = std::uint32_t{1} << n;
    auto majority = [&](std::uint32_t beta, std::uint32_t alpha) {
        std::size_t yes = 0;
        for (const auto& c : closures) yes += c.reach(alpha, beta) ? 1 : 0;
        return yes >= t;
    };
    // Canonical order: rank order, not packed order.
    for (std::uint64_t ra = 0; ra < vertices; ++ra) {
        const Outcome alpha = Outcome::from_rank(ra, n);
        const auto a = static_cast<std::uint32_t>(alpha.packed());
        bool beaten = false;
        for (std::uint32_t b = 0; b < vertices && !beaten; ++b) beaten = b != a && majority(b, a);
        ++r.checked;
        if (!beaten) {
            r.pass = false;
            r.message = "outcome is majority optimal";
            r.alpha = alpha;
            return r;
        }
    }
    return r;
}

}  // namespace detail

inline LemmaReport verify_lemma(std::string_view tag, const LemmaInstance& instance, const OracleLimits& limits = {}) {
    auto formula = [&]() -> const CnfFormula& {
        if (const auto* f = std::get_if<CnfFormula>(&instance)) return *f;
        throw InvalidInput("lemma " + std::string(tag) + " needs a CNF formula");
    };
    auto profile = [&]() -> const MCPNet& {
        if (const auto* m = std::get_if<MCPNet>(&instance)) return *m;
        throw InvalidInput("lemma " + std::string(tag) + " needs an mCP-net");
    };
    if (tag == "corollary1") return detail::verify_formula_net(formula(), false, limits);
    if (tag == "lemma1") return detail::verify_formula_net(formula(), true, limits);
    if (tag == "corollary2") return detail::verify_summarized(formula(), false, limits);
    if (tag == "lemma3") return detail::verify_summarized(formula(), true, limits);
    if (tag == "lemma5") return detail::verify_ipo(formula(), limits);
    if (tag == "lemma7") return detail::verify_same_optimum(profile(), limits);
    if (tag == "theorem_nowin") return detail::verify_no_winner(profile(), limits);
    throw InvalidInput("unknown lemma tag \"" + std::string(tag) + "\"");
}

// First ordered pair (alpha, beta), in canonical order, on which the search
// engine and the closure disagree about beta dominating alpha.
struct Disagreement {
    Outcome alpha;
    Outcome beta;
    bool engine = false;
    bool oracle = false;
};

inline std::optional<Disagreement> check_engine(const CPNet& net, std::size_t bound = 14, std::size_t* pairs = nullptr) {
    const auto c = closure(net, bound);
    const std::size_t n = net.feature_count();
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t ra = 0; ra < count; ++ra) {
        const Outcome alpha = Outcome::from_rank(ra, n);
        for (std::uint64_t rb = 0; rb < count; ++rb) {
            const Outcome beta = Outcome::from_rank(rb, n);
            const bool engine = dominates(net, beta, alpha).holds;
            const bool truth = c.dominates(beta, alpha);
            if (pairs) ++*pairs;
            if (engine != truth) return Disagreement{alpha, beta, engine, truth};
        }
    }
    return std::nullopt;
}

}  // namespace cpnet::oracle
