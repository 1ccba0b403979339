#pragma once

// Single-agent CP-net semantics: improving flips, dominance by breadth-first
// search over the flip graph, incomparability, and optimality.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "cpnet/detail/search.hpp"
#include "cpnet/model.hpp"

namespace cpnet {

struct SearchLimits {
    std::size_t max_states = std::size_t{1} << 24;
};

struct FlipStep {
    std::size_t feature;
    Value from;
    Value to;

    friend bool operator==(const FlipStep&, const FlipStep&) = default;
};

// Witness of a dominance relation: applying `steps` to `start` yields `end`,
// each step being an improving flip when applied.
struct FlipSequence {
    Outcome start;
    Outcome end;
    std::vector<FlipStep> steps;
};

struct DominanceAnswer {
    bool holds = false;
    std::optional<FlipSequence> witness;
    std::size_t visited = 0;
};

// Replays a witness against the net. True iff every step is an improving flip
// from the current outcome and the sequence ends at `end`.
inline bool replay(const CPNet& net, const FlipSequence& seq) {
    if (seq.start.size() != net.feature_count() || seq.end.size() != net.feature_count()) return false;
    Outcome current = seq.start;
    for (const auto& step : seq.steps) {
        if (step.feature >= net.feature_count()) return false;
        if (current[step.feature] != step.from || step.to != flip(step.from)) return false;
        if (net.preferred(step.feature, current) != step.to) return false;
        current.set(step.feature, step.to);
    }
    return current == seq.end;
}

inline std::vector<std::pair<std::size_t, Outcome>> improving_flips(const CPNet& net, const Outcome& o) {
    detail::require_well_formed(net);
    require_dimension(net, o);
    std::vector<std::pair<std::size_t, Outcome>> out;
    for (std::size_t f = 0; f < net.feature_count(); ++f) {
        if (net.improvable(f, o)) out.emplace_back(f, o.flipped(f));
    }
    return out;
}

namespace detail {

template <class State>
FlipSequence to_sequence(const Walk<State>& w, std::size_t index, const Outcome& start, std::size_t n) {
    FlipSequence seq{start, to_outcome(w.states[index], n), {}};
    Outcome current = start;
    for (auto f : w.path_to(index)) {
        const Value from = current[f];
        seq.steps.push_back({f, from, flip(from)});
        current.toggle(f);
    }
    return seq;
}

}  // namespace detail

// beta ≻ alpha iff beta is reachable from alpha by improving flips. The
// witness is a shortest flip sequence; among equally short ones, the first
// found when expanding features in index order.
inline DominanceAnswer dominates(const CPNet& net, const Outcome& beta, const Outcome& alpha,
                                 SearchLimits limits = {}) {
    detail::require_well_formed(net);
    require_dimension(net, alpha);
    require_dimension(net, beta);
    if (alpha == beta) return {};
    const std::size_t n = net.feature_count();
    return detail::with_state_space(n, [&](auto tag, auto& visited) {
        using State = decltype(tag);
        const State start = detail::to_state<State>(alpha);
        const State target = detail::to_state<State>(beta);
        std::size_t hit = 0;
        auto w = detail::walk(net, start, visited, limits.max_states, detail::Direction::Forward, true,
                              [&](const State& s, std::size_t i) {
                                  if (!(s == target)) return false;
                                  hit = i;
                                  return true;
                              });
        DominanceAnswer ans;
        ans.visited = w.states.size();
        if (w.stopped) {
            ans.holds = true;
            ans.witness = detail::to_sequence(w, hit, alpha, n);
        }
        return ans;
    });
}

// All outcomes reachable from `from` by improving flips, `from` included,
// in breadth-first discovery order.
inline std::vector<Outcome> reachable_outcomes(const CPNet& net, const Outcome& from, SearchLimits limits = {}) {
    detail::require_well_formed(net);
    require_dimension(net, from);
    const std::size_t n = net.feature_count();
    return detail::with_state_space(n, [&](auto tag, auto& visited) {
        using State = decltype(tag);
        auto w = detail::walk(net, detail::to_state<State>(from), visited, limits.max_states,
                              detail::Direction::Forward, false, [](const State&, std::size_t) { return false; });
        std::vector<Outcome> out;
        out.reserve(w.states.size());
        for (const auto& s : w.states) out.push_back(detail::to_outcome(s, n));
        return out;
    });
}

inline bool incomparable(const CPNet& net, const Outcome& alpha, const Outcome& beta, SearchLimits limits = {}) {
    if (alpha == beta) throw InvalidInput("incomparable: outcomes are equal");
    return !dominates(net, alpha, beta, limits).holds && !dominates(net, beta, alpha, limits).holds;
}

// True iff some ranking consistent with the net puts alpha above beta, that is
// iff beta does not dominate alpha.
inline bool ordering_query(const CPNet& net, const Outcome& alpha, const Outcome& beta, SearchLimits limits = {}) {
    return !dominates(net, beta, alpha, limits).holds;
}

inline bool is_optimal(const CPNet& net, const Outcome& alpha) {
    detail::require_well_formed(net);
    require_dimension(net, alpha);
    for (std::size_t f = 0; f < net.feature_count(); ++f) {
        if (net.improvable(f, alpha)) return false;
    }
    return true;
}

inline Outcome forward_sweep_optimum(const CPNet& net) {
    detail::require_well_formed(net);
    Outcome out(net.feature_count());
    for (auto f : topological_order(net)) out.set(f, net.preferred(f, out));
    return out;
}

}  // namespace cpnet
