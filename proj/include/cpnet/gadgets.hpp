#pragma once

// Reduction gadgets: formula nets, interconnecting nets, direct nets,
// summarized formula nets, the composite profiles M_ipo, M_eml and M_imm, and
// the fixed four-agent profile M_NoWin.

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cpnet/errors.hpp"
#include "cpnet/formula.hpp"
#include "cpnet/model.hpp"

namespace cpnet {

// ---------------------------------------------------------------------------
// Interconnecting nets

enum class Junction { Conjunctive, Disjunctive };

// Wiring of an inverted pyramid over `inputs`. Fresh features are listed in
// creation order, layer by layer; parents[i] belongs to features[i].
struct Interconnect {
    std::vector<std::size_t> inputs;
    std::vector<std::size_t> features;
    std::vector<std::vector<std::size_t>> parents;
    std::size_t apex = 0;
    std::vector<std::size_t> layer_sizes;
};

// Pairs each layer left to right; an odd layer of size >= 3 ends with a
// triple. Fresh features get consecutive indices starting at first_fresh.
inline Interconnect plan_interconnect(const std::vector<std::size_t>& inputs, std::size_t first_fresh) {
    if (inputs.empty()) throw InvalidInput("interconnecting net needs at least one input");
    Interconnect h;
    h.inputs = inputs;
    std::vector<std::size_t> layer = inputs;
    std::size_t next = first_fresh;
    do {
        std::vector<std::vector<std::size_t>> groups;
        if (layer.size() == 1) {
            groups.push_back(layer);
        } else {
            const std::size_t pairs = layer.size() / 2;
            for (std::size_t g = 0; g < pairs; ++g) groups.push_back({layer[2 * g], layer[2 * g + 1]});
            if (layer.size() % 2 == 1) groups.back().push_back(layer.back());
        }
        std::vector<std::size_t> fresh;
        for (auto& g : groups) {
            h.features.push_back(next);
            h.parents.push_back(std::move(g));
            fresh.push_back(next++);
        }
        h.layer_sizes.push_back(fresh.size());
        layer = std::move(fresh);
    } while (layer.size() > 1);
    h.apex = layer.front();
    return h;
}

// Appends the fresh features (named prefix1, prefix2, ...) and returns the plan.
inline Interconnect add_interconnect(NetBuilder& b, const std::vector<std::size_t>& inputs,
                                     const std::string& prefix) {
    auto h = plan_interconnect(inputs, b.size());
    for (std::size_t i = 0; i < h.features.size(); ++i) b.add(prefix + std::to_string(i + 1));
    return h;
}

inline void wire_interconnect(NetBuilder& b, const Interconnect& h, Junction j) {
    const auto rule = j == Junction::Conjunctive ? rules::all_one(Value::One, Value::Zero)
                                                 : rules::any_one(Value::One, Value::Zero);
    for (std::size_t i = 0; i < h.features.size(); ++i) b.conditional(h.features[i], h.parents[i], rule);
}

struct InterconnectNet {
    CPNet net;
    Interconnect wiring;
};

// Standalone H_C(m) / H_D(m): inputs S1..Sm are parentless and prefer 1.
inline InterconnectNet interconnect_net(std::size_t m, Junction j) {
    if (m == 0) throw InvalidInput("interconnecting net needs m >= 1");
    NetBuilder b;
    std::vector<std::size_t> inputs;
    for (std::size_t i = 0; i < m; ++i) {
        inputs.push_back(b.add("S" + std::to_string(i + 1)));
        b.unconditional(inputs.back(), Value::One);
    }
    auto h = add_interconnect(b, inputs, "A_");
    wire_interconnect(b, h, j);
    return {b.build(), std::move(h)};
}

inline InterconnectNet h_c(std::size_t m) { return interconnect_net(m, Junction::Conjunctive); }
inline InterconnectNet h_d(std::size_t m) { return interconnect_net(m, Junction::Disjunctive); }

// ---------------------------------------------------------------------------
// Formula nets

struct FormulaLayout {
    std::vector<std::size_t> var_true;                // by variable
    std::vector<std::size_t> var_false;               // by variable
    std::vector<std::vector<std::size_t>> literals;   // [clause][position]
    std::vector<std::size_t> clauses;

    std::vector<std::size_t> variable_features() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < var_true.size(); ++i) {
            out.push_back(var_true[i]);
            out.push_back(var_false[i]);
        }
        return out;
    }

    std::vector<std::size_t> literal_features() const {
        std::vector<std::size_t> out;
        for (const auto& c : literals) out.insert(out.end(), c.begin(), c.end());
        return out;
    }
};

using VarNamer = std::function<std::string(std::size_t var)>;

inline std::string default_var_name(std::size_t var) { return "V" + std::to_string(var + 1); }

// Appends V^T, V^F per variable, then P_j_k per literal, then D_j per clause.
inline FormulaLayout add_formula_features(NetBuilder& b, const CnfFormula& phi, const VarNamer& var_name,
                                          const std::string& suffix = "") {
    FormulaLayout l;
    for (std::size_t i = 0; i < phi.num_vars; ++i) {
        l.var_true.push_back(b.add(var_name(i) + "^T" + suffix));
        l.var_false.push_back(b.add(var_name(i) + "^F" + suffix));
    }
    for (std::size_t j = 0; j < phi.clauses.size(); ++j) {
        l.literals.emplace_back();
        for (std::size_t k = 0; k < phi.clauses[j].size(); ++k) {
            l.literals.back().push_back(
                b.add("P_" + std::to_string(j + 1) + "_" + std::to_string(k + 1) + suffix));
        }
    }
    for (std::size_t j = 0; j < phi.clauses.size(); ++j) l.clauses.push_back(b.add("D_" + std::to_string(j + 1) + suffix));
    return l;
}

// Pattern on (V^T, V^F) under which literal l may be raised.
inline std::vector<Value> literal_pattern(const Literal& l) {
    return l.negated ? std::vector<Value>{Value::Zero, Value::One} : std::vector<Value>{Value::One, Value::Zero};
}

// Variable features prefer 1. With a gate feature G they prefer 1 only while
// G = 0, and literal features additionally require G = 0.
inline void wire_variables(NetBuilder& b, const FormulaLayout& l, std::optional<std::size_t> gate = {}) {
    for (auto f : l.variable_features()) {
        if (gate) {
            b.conditional(f, {*gate}, rules::all_one(Value::Zero, Value::One));
        } else {
            b.unconditional(f, Value::One);
        }
    }
}

inline void wire_literals(NetBuilder& b, const CnfFormula& phi, const FormulaLayout& l,
                          std::optional<std::size_t> gate = {}) {
    for (std::size_t j = 0; j < phi.clauses.size(); ++j) {
        for (std::size_t k = 0; k < phi.clauses[j].size(); ++k) {
            const auto& lit = phi.clauses[j][k];
            auto want = literal_pattern(lit);
            std::vector<std::size_t> parents{l.var_true[lit.var], l.var_false[lit.var]};
            if (gate) {
                parents.insert(parents.begin(), *gate);
                want.insert(want.begin(), Value::Zero);
            }
            b.conditional(l.literals[j][k], std::move(parents), rules::pattern(std::move(want), Value::One, Value::Zero));
        }
    }
}

inline void wire_clauses(NetBuilder& b, const FormulaLayout& l) {
    for (std::size_t j = 0; j < l.clauses.size(); ++j) {
        b.conditional(l.clauses[j], l.literals[j], rules::any_one(Value::One, Value::Zero));
    }
}

inline void prefer_fixed(NetBuilder& b, const std::vector<std::size_t>& features, Value v) {
    for (auto f : features) b.unconditional(f, v);
}

// Writes the encoding of sigma onto the variable features of `base`:
// true -> (1, 0), false -> (0, 1), undefined -> (0, 0).
inline Outcome encode_assignment(const PartialAssignment& sigma, const FormulaLayout& l, Outcome base) {
    require_in_range(sigma, l.var_true.size());
    for (std::size_t i = 0; i < l.var_true.size(); ++i) {
        auto it = sigma.find(i);
        base.set(l.var_true[i], to_value(it != sigma.end() && it->second));
        base.set(l.var_false[i], to_value(it != sigma.end() && !it->second));
    }
    return base;
}

inline Outcome encode_assignment(const PartialAssignment& sigma, const FormulaLayout& l, std::size_t features) {
    return encode_assignment(sigma, l, Outcome(features));
}

struct FormulaNet {
    CPNet net;
    FormulaLayout layout;

    Outcome alpha() const { return Outcome(net.feature_count()); }

    // 1 on variable and clause features, 0 elsewhere.
    Outcome beta_bar() const {
        Outcome o(net.feature_count());
        for (auto f : layout.variable_features()) o.set(f, Value::One);
        for (auto f : layout.clauses) o.set(f, Value::One);
        return o;
    }
};

inline FormulaNet formula_net(const CnfFormula& phi) {
    phi.validate();
    NetBuilder b;
    auto l = add_formula_features(b, phi, default_var_name);
    wire_variables(b, l);
    wire_literals(b, phi, l);
    wire_clauses(b, l);
    return {b.build(), std::move(l)};
}

// ---------------------------------------------------------------------------
// Direct nets

inline CPNet direct_net(const Outcome& alpha, std::vector<std::string> names) {
    if (names.size() != alpha.size()) throw InvalidInput("direct net: outcome length does not match feature count");
    NetBuilder b(std::move(names));
    for (std::size_t f = 0; f < alpha.size(); ++f) b.unconditional(f, alpha[f]);
    return b.build();
}

// Features named F1..Fn.
inline CPNet direct_net(const Outcome& alpha) {
    std::vector<std::string> names;
    for (std::size_t f = 0; f < alpha.size(); ++f) names.push_back("F" + std::to_string(f + 1));
    return direct_net(alpha, std::move(names));
}

// ---------------------------------------------------------------------------
// Summarized formula nets

struct SummarizedLayout {
    FormulaLayout formula;
    std::size_t u1 = 0;
    std::size_t u2 = 0;
    Interconnect hc;  // over the clause features
};

// U1, variable features, literal features, clause features, A_i, U2.
inline SummarizedLayout add_summarized_features(NetBuilder& b, const CnfFormula& phi, const VarNamer& var_name) {
    SummarizedLayout s;
    s.u1 = b.add("U1");
    s.formula = add_formula_features(b, phi, var_name);
    s.hc = add_interconnect(b, s.formula.clauses, "A_");
    s.u2 = b.add("U2");
    return s;
}

// Tables of the summarized formula net. `first` is the parentless gate and
// `second` follows the apex; the plain net uses (U1, U2).
inline void wire_summarized(NetBuilder& b, const CnfFormula& phi, const SummarizedLayout& s, std::size_t first,
                            std::size_t second) {
    b.unconditional(first, Value::One);
    wire_variables(b, s.formula, first);
    wire_literals(b, phi, s.formula, first);
    wire_clauses(b, s.formula);
    wire_interconnect(b, s.hc, Junction::Conjunctive);
    b.conditional(second, {s.hc.apex}, rules::all_one(Value::One, Value::Zero));
}

struct SummarizedNet {
    CPNet net;
    SummarizedLayout layout;

    Outcome alpha() const { return Outcome(net.feature_count()); }

    Outcome alpha_sigma(const PartialAssignment& sigma) const {
        return encode_assignment(sigma, layout.formula, net.feature_count());
    }

    // U1 = U2 = 1, variable features as given by `variables`, 0 elsewhere.
    Outcome beta_bar(const PartialAssignment& variables = {}) const {
        Outcome o = encode_assignment(variables, layout.formula, net.feature_count());
        o.set(layout.u1, Value::One);
        o.set(layout.u2, Value::One);
        return o;
    }
};

inline SummarizedNet summarized_formula_net(const CnfFormula& phi) {
    phi.validate();
    if (phi.clauses.empty()) throw InvalidInput("summarized formula net needs at least one clause");
    NetBuilder b;
    auto s = add_summarized_features(b, phi, default_var_name);
    wire_summarized(b, phi, s, s.u1, s.u2);
    return {b.build(), std::move(s)};
}

// ---------------------------------------------------------------------------
// M_ipo: two formula-net copies, each agent gating the other copy's
// variable features on the apex of a conjunctive net over its own clauses.

struct IpoProfile {
    MCPNet profile;
    FormulaLayout copy_a;
    FormulaLayout copy_b;
    Interconnect hc_agent1;  // over copy a clause features
    Interconnect hc_agent2;  // over copy b clause features, same fresh features

    Outcome alpha() const { return Outcome(profile.feature_count()); }
};

inline IpoProfile m_ipo(const CnfFormula& phi) {
    phi.validate();
    if (phi.clauses.empty()) throw InvalidInput("M_ipo needs at least one clause");
    NetBuilder universe;
    IpoProfile p;
    p.copy_a = add_formula_features(universe, phi, default_var_name, "^a");
    p.copy_b = add_formula_features(universe, phi, default_var_name, "^b");
    p.hc_agent1 = add_interconnect(universe, p.copy_a.clauses, "A_");
    p.hc_agent2 = plan_interconnect(p.copy_b.clauses, p.hc_agent1.features.front());

    auto agent = [&](const FormulaLayout& own, const FormulaLayout& other, const Interconnect& hc) {
        NetBuilder b(universe.names());
        wire_variables(b, own);
        wire_literals(b, phi, own);
        wire_clauses(b, own);
        wire_interconnect(b, hc, Junction::Conjunctive);
        for (auto f : other.variable_features()) b.conditional(f, {hc.apex}, rules::all_one(Value::One, Value::Zero));
        wire_literals(b, phi, other);
        wire_clauses(b, other);
        return b.build();
    };
    p.profile = MCPNet({agent(p.copy_a, p.copy_b, p.hc_agent1), agent(p.copy_b, p.copy_a, p.hc_agent2)});
    return p;
}

// ---------------------------------------------------------------------------
// M_eml and M_imm

struct QbfLayout {
    SummarizedLayout summarized;
    std::vector<std::size_t> v_prime;  // by position in the X block
    Interconnect hd;                   // over V', W, P, D, A

    std::vector<std::size_t> w_features(const Qbf2Formula& Phi) const {
        std::vector<std::size_t> out;
        for (auto y : Phi.forall_vars) {
            out.push_back(summarized.formula.var_true[y]);
            out.push_back(summarized.formula.var_false[y]);
        }
        return out;
    }
};

struct QbfProfile {
    MCPNet profile;
    QbfLayout layout;

    // sigma over X encoded on the V features, 0 elsewhere.
    Outcome beta_sigma(const PartialAssignment& sigma) const {
        return encode_assignment(sigma, layout.summarized.formula, profile.feature_count());
    }

    // 1 exactly on U1 and U2.
    Outcome alpha_bar() const {
        Outcome o(profile.feature_count());
        o.set(layout.summarized.u1, Value::One);
        o.set(layout.summarized.u2, Value::One);
        return o;
    }
};

namespace detail {

inline std::string qbf_var_name(const Qbf2Formula& Phi, std::size_t var) {
    for (std::size_t k = 0; k < Phi.exists_vars.size(); ++k) {
        if (Phi.exists_vars[k] == var) return "V" + std::to_string(k + 1);
    }
    for (std::size_t k = 0; k < Phi.forall_vars.size(); ++k) {
        if (Phi.forall_vars[k] == var) return "W" + std::to_string(k + 1);
    }
    return default_var_name(var);
}

inline std::pair<NetBuilder, QbfLayout> qbf_universe(const Qbf2Formula& Phi) {
    Phi.validate();
    if (Phi.matrix.clauses.empty()) throw InvalidInput("matrix needs at least one clause");
    NetBuilder u;
    QbfLayout l;
    l.summarized = add_summarized_features(u, Phi.matrix, [&](std::size_t v) { return qbf_var_name(Phi, v); });
    for (std::size_t k = 0; k < Phi.exists_vars.size(); ++k) l.v_prime.push_back(u.add("V" + std::to_string(k + 1) + "'"));
    std::vector<std::size_t> inputs = l.v_prime;
    for (auto f : l.w_features(Phi)) inputs.push_back(f);
    for (auto f : l.summarized.formula.literal_features()) inputs.push_back(f);
    for (auto f : l.summarized.formula.clauses) inputs.push_back(f);
    for (auto f : l.summarized.hc.features) inputs.push_back(f);
    l.hd = add_interconnect(u, inputs, "B_");
    return {std::move(u), std::move(l)};
}

inline std::vector<std::size_t> primed_and_b(const QbfLayout& l) {
    auto out = l.v_prime;
    out.insert(out.end(), l.hd.features.begin(), l.hd.features.end());
    return out;
}

// Summarized formula net plus a direct net preferring 0 on V' and B.
inline CPNet qbf_n1(const NetBuilder& u, const Qbf2Formula& Phi, const QbfLayout& l, bool exchanged) {
    NetBuilder b(u.names());
    const auto& s = l.summarized;
    if (exchanged) {
        wire_summarized(b, Phi.matrix, s, s.u2, s.u1);
    } else {
        wire_summarized(b, Phi.matrix, s, s.u1, s.u2);
    }
    prefer_fixed(b, primed_and_b(l), Value::Zero);
    return b.build();
}

inline CPNet qbf_n3(const NetBuilder& u, const Qbf2Formula& Phi, const QbfLayout& l) {
    NetBuilder b(u.names());
    const auto& s = l.summarized;
    prefer_fixed(b, s.formula.variable_features(), Value::Zero);
    prefer_fixed(b, s.formula.literal_features(), Value::Zero);
    prefer_fixed(b, s.formula.clauses, Value::Zero);
    prefer_fixed(b, s.hc.features, Value::Zero);
    for (std::size_t k = 0; k < Phi.exists_vars.size(); ++k) {
        const auto x = Phi.exists_vars[k];
        b.conditional(l.v_prime[k], {s.formula.var_true[x], s.formula.var_false[x]},
                      rules::all_one(Value::One, Value::Zero));
    }
    wire_interconnect(b, l.hd, Junction::Disjunctive);
    b.conditional(s.u1, {l.hd.apex}, rules::all_one(Value::One, Value::Zero));
    b.conditional(s.u2, {s.u1}, rules::all_one(Value::One, Value::Zero));
    return b.build();
}

}  // namespace detail

inline QbfProfile m_eml(const Qbf2Formula& Phi) {
    auto [u, l] = detail::qbf_universe(Phi);
    const auto& s = l.summarized;
    const std::size_t n = u.size();

    NetBuilder n5(u.names());
    for (std::size_t f = 0; f < n; ++f) {
        if (f != s.u1 && f != s.u2) n5.unconditional(f, Value::Zero);
    }
    n5.unconditional(s.u1, Value::One);
    n5.conditional(s.u2, {s.u1}, rules::all_one(Value::One, Value::Zero));

    NetBuilder n6(u.names());
    n6.unconditional(s.u2, Value::One);
    for (std::size_t f = 0; f < n; ++f) {
        if (f != s.u2) n6.conditional(f, {s.u2}, rules::all_one(Value::Zero, Value::One));
    }

    auto n3 = detail::qbf_n3(u, Phi, l);
    MCPNet profile({detail::qbf_n1(u, Phi, l, false), detail::qbf_n1(u, Phi, l, true), n3, n3, n5.build(),
                    n6.build()});
    return {std::move(profile), std::move(l)};
}

inline QbfProfile m_imm(const Qbf2Formula& Phi) {
    auto [u, l] = detail::qbf_universe(Phi);
    QbfProfile p{MCPNet{}, std::move(l)};
    Outcome alpha_bar(u.size());
    alpha_bar.set(p.layout.summarized.u1, Value::One);
    alpha_bar.set(p.layout.summarized.u2, Value::One);
    p.profile = MCPNet({detail::qbf_n1(u, Phi, p.layout, false), direct_net(alpha_bar, u.names()),
                        detail::qbf_n3(u, Phi, p.layout)});
    return p;
}

// ---------------------------------------------------------------------------
// M_NoWin over features A, B. Each agent has one dependency edge; the induced
// orders are, with a = 0 and the overlined value = 1:
//   N1: 11 > 10 > 00 > 01     N2: 10 > 00 > 01 > 11
//   N3: 00 > 01 > 11 > 10     N4: 01 > 11 > 10 > 00
inline MCPNet m_nowin() {
    const std::vector<std::string> names{"A", "B"};
    const std::vector<std::array<std::string, 2>> labels{{{"a", "~a"}, {"b", "~b"}}};
    auto a_then_b = [&](Value a, bool b_follows_a) {
        NetBuilder n(names);
        n.unconditional(0, a);
        n.conditional(1, {0}, b_follows_a ? rules::all_one(Value::One, Value::Zero)
                                          : rules::all_one(Value::Zero, Value::One));
        auto net = n.build();
        net.set_value_labels(labels);
        return net;
    };
    auto b_then_a = [&](Value b, bool a_follows_b) {
        NetBuilder n(names);
        n.unconditional(1, b);
        n.conditional(0, {1}, a_follows_b ? rules::all_one(Value::One, Value::Zero)
                                          : rules::all_one(Value::Zero, Value::One));
        auto net = n.build();
        net.set_value_labels(labels);
        return net;
    };
    return MCPNet({a_then_b(Value::One, true), b_then_a(Value::Zero, false), a_then_b(Value::Zero, true),
                   b_then_a(Value::One, false)});
}

}  // namespace cpnet
