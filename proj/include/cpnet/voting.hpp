#pragma once

// Voting semantics over mCP-nets: Pareto and majority dominance, optimality,
// optimum testing and the corresponding existence questions.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cpnet/detail/search.hpp"
#include "cpnet/errors.hpp"
#include "cpnet/model.hpp"
#include "cpnet/semantics.hpp"

namespace cpnet {

struct VotingLimits {
    std::size_t max_states = std::size_t{1} << 24;  // per single search
    // Largest feature count for which the exists-* majority questions
    // enumerate all candidate outcomes.
    std::size_t max_enumeration_features = 14;
    // Largest feature count for the majority-optimum test, which keeps one
    // counter per outcome.
    std::size_t max_counting_features = 24;
};

struct SearchStats {
    std::size_t visited = 0;
};

struct AgentPartition {
    std::vector<std::size_t> prefers;
    std::vector<std::size_t> opposes;
    std::vector<std::size_t> incomparables;
};

struct ExistenceAnswer {
    bool exists = false;
    std::optional<Outcome> witness;
};

namespace detail {

inline void require_profile(const MCPNet& m) {
    if (m.agent_count() == 0) throw InvalidInput("mCP-net has no agents");
    if (m.agent_count() >= 0xffff) throw InvalidInput("too many agents");
    for (const auto& a : m.agents()) {
        require_well_formed(a);
        if (a.names() != m.names()) throw InvalidInput("agents do not share one feature list");
    }
}

inline void require_dimension(const MCPNet& m, const Outcome& o) {
    if (o.size() != m.feature_count()) {
        throw InvalidInput("outcome has " + std::to_string(o.size()) + " features, mCP-net has " +
                           std::to_string(m.feature_count()));
    }
}

inline std::size_t majority_threshold(std::size_t agents) { return agents / 2 + 1; }

inline void add_visited(SearchStats* stats, std::size_t n) {
    if (stats) stats->visited += n;
}

inline void require_enumerable(const MCPNet& m, std::size_t bound, const char* what) {
    if (m.feature_count() > bound) {
        throw InstanceTooLarge(std::string(what) + ": " + std::to_string(m.feature_count()) +
                               " features exceed the exhaustive bound of " + std::to_string(bound));
    }
}

inline bool is_majority_optimal_unchecked(const MCPNet& m, const Outcome& alpha, const VotingLimits& limits,
                                          SearchStats* stats) {
    const std::size_t n = m.feature_count();
    const std::size_t agents = m.agent_count();
    const std::size_t t = majority_threshold(agents);
    return with_state_type(n, [&](auto tag) {
        using State = decltype(tag);
        const State start = to_state<State>(alpha);
        StateCounter<State> counts(n);
        std::size_t best = 0;
        for (std::size_t i = 0; i < agents; ++i) {
            // Even if every remaining agent reached the best-so-far outcome,
            // nobody would get a majority.
            if (best + (agents - i) < t) return true;
            auto [visited, stopped] =
                for_each_reachable(m.agent(i), start, Direction::Forward, limits.max_states, [&](const State& s) {
                    const std::size_t c = counts.increment(s);
                    if (c > best) best = c;
                    return c >= t;
                });
            add_visited(stats, visited);
            if (stopped) return false;
        }
        return true;
    });
}

inline bool is_majority_optimum_unchecked(const MCPNet& m, const Outcome& alpha, const VotingLimits& limits,
                                          SearchStats* stats) {
    const std::size_t n = m.feature_count();
    const std::size_t agents = m.agent_count();
    const std::size_t t = majority_threshold(agents);
    const std::uint64_t others = (std::uint64_t{1} << n) - 1;
    const std::uint64_t start = alpha.packed();
    StateCounter<std::uint64_t> counts(n);
    // histogram[k] = number of outcomes other than alpha counted k times.
    std::vector<std::uint64_t> histogram(agents + 1, 0);
    histogram[0] = others;
    for (std::size_t i = 0; i < agents; ++i) {
        auto [visited, stopped] =
            for_each_reachable(m.agent(i), start, Direction::Backward, limits.max_states, [&](std::uint64_t s) {
                const std::size_t c = counts.increment(s);
                --histogram[c - 1];
                ++histogram[c];
                return false;
            });
        (void)stopped;
        add_visited(stats, visited);
        // Outcomes stuck below what the remaining agents could still lift to t.
        const std::size_t remaining = agents - i - 1;
        for (std::size_t c = 0; c + remaining < t; ++c) {
            if (histogram[c] != 0) return false;
        }
    }
    return true;
}

}  // namespace detail

inline AgentPartition agent_partition(const MCPNet& m, const Outcome& beta, const Outcome& alpha,
                                      SearchLimits limits = {}, SearchStats* stats = nullptr) {
    detail::require_profile(m);
    detail::require_dimension(m, alpha);
    detail::require_dimension(m, beta);
    if (alpha == beta) throw InvalidInput("agent partition needs distinct outcomes");
    AgentPartition p;
    for (std::size_t i = 0; i < m.agent_count(); ++i) {
        auto fwd = dominates(m.agent(i), beta, alpha, limits);
        detail::add_visited(stats, fwd.visited);
        if (fwd.holds) {
            p.prefers.push_back(i);
            continue;
        }
        auto back = dominates(m.agent(i), alpha, beta, limits);
        detail::add_visited(stats, back.visited);
        (back.holds ? p.opposes : p.incomparables).push_back(i);
    }
    return p;
}

inline bool pareto_dominates(const MCPNet& m, const Outcome& beta, const Outcome& alpha, SearchLimits limits = {},
                             SearchStats* stats = nullptr) {
    detail::require_profile(m);
    detail::require_dimension(m, alpha);
    detail::require_dimension(m, beta);
    if (alpha == beta) return false;
    for (const auto& net : m.agents()) {
        auto a = dominates(net, beta, alpha, limits);
        detail::add_visited(stats, a.visited);
        if (!a.holds) return false;
    }
    return true;
}

// More than half of the agents prefer beta to alpha.
inline bool majority_dominates(const MCPNet& m, const Outcome& beta, const Outcome& alpha, SearchLimits limits = {},
                               SearchStats* stats = nullptr) {
    detail::require_profile(m);
    detail::require_dimension(m, alpha);
    detail::require_dimension(m, beta);
    if (alpha == beta) return false;
    const std::size_t agents = m.agent_count();
    const std::size_t t = detail::majority_threshold(agents);
    std::size_t yes = 0;
    for (std::size_t i = 0; i < agents; ++i) {
        if (yes + (agents - i) < t) return false;
        auto a = dominates(m.agent(i), beta, alpha, limits);
        detail::add_visited(stats, a.visited);
        if (a.holds && ++yes >= t) return true;
    }
    return false;
}

// alpha is Pareto optimal iff no outcome other than alpha is reachable from
// alpha in every agent's net.
inline bool is_pareto_optimal(const MCPNet& m, const Outcome& alpha, VotingLimits limits = {},
                              SearchStats* stats = nullptr) {
    detail::require_profile(m);
    detail::require_dimension(m, alpha);
    const std::size_t n = m.feature_count();
    const std::size_t agents = m.agent_count();
    return detail::with_state_type(n, [&](auto tag) {
        using State = decltype(tag);
        const State start = detail::to_state<State>(alpha);
        // counts[s] == i after agent i-1 means s is in every set so far.
        detail::StateCounter<State> counts(n);
        for (std::size_t i = 0; i < agents; ++i) {
            const bool last = i + 1 == agents;
            std::size_t survivors = 0;
            auto [visited, stopped] = detail::for_each_reachable(
                m.agent(i), start, detail::Direction::Forward, limits.max_states, [&](const State& s) {
                    if (counts.get(s) != i) return false;
                    counts.increment(s);
                    ++survivors;
                    return last;
                });
            detail::add_visited(stats, visited);
            if (stopped) return false;
            if (survivors == 0) return true;
        }
        return true;
    });
}

// The optimum of the first agent is never Pareto dominated.
inline ExistenceAnswer exists_pareto_optimal(const MCPNet& m) {
    detail::require_profile(m);
    return {true, forward_sweep_optimum(m.agent(0))};
}

inline bool is_pareto_optimum(const MCPNet& m, const Outcome& alpha) {
    detail::require_profile(m);
    detail::require_dimension(m, alpha);
    for (const auto& net : m.agents()) {
        if (!is_optimal(net, alpha)) return false;
    }
    return true;
}

inline ExistenceAnswer exists_pareto_optimum(const MCPNet& m) {
    detail::require_profile(m);
    Outcome first = forward_sweep_optimum(m.agent(0));
    for (std::size_t i = 1; i < m.agent_count(); ++i) {
        if (!is_optimal(m.agent(i), first)) return {};
    }
    return {true, std::move(first)};
}

inline bool is_majority_optimal(const MCPNet& m, const Outcome& alpha, VotingLimits limits = {},
                                SearchStats* stats = nullptr) {
    detail::require_profile(m);
    detail::require_dimension(m, alpha);
    return detail::is_majority_optimal_unchecked(m, alpha, limits, stats);
}

// alpha majority dominates every other outcome: every beta reaches alpha in
// a majority of the agents' nets.
inline bool is_majority_optimum(const MCPNet& m, const Outcome& alpha, VotingLimits limits = {},
                                SearchStats* stats = nullptr) {
    detail::require_profile(m);
    detail::require_dimension(m, alpha);
    detail::require_enumerable(m, limits.max_counting_features, "majority optimum test");
    return detail::is_majority_optimum_unchecked(m, alpha, limits, stats);
}

// Lowest qualifying outcome in canonical order.
inline ExistenceAnswer exists_majority_optimal(const MCPNet& m, VotingLimits limits = {},
                                               SearchStats* stats = nullptr) {
    detail::require_profile(m);
    detail::require_enumerable(m, limits.max_enumeration_features, "majority optimal search");
    const std::size_t n = m.feature_count();
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << n); ++r) {
        Outcome alpha = Outcome::from_rank(r, n);
        if (detail::is_majority_optimal_unchecked(m, alpha, limits, stats)) return {true, std::move(alpha)};
    }
    return {};
}

// A majority optimum is unique when it exists.
inline ExistenceAnswer exists_majority_optimum(const MCPNet& m, VotingLimits limits = {},
                                               SearchStats* stats = nullptr) {
    detail::require_profile(m);
    detail::require_enumerable(m, limits.max_enumeration_features, "majority optimum search");
    const std::size_t n = m.feature_count();
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << n); ++r) {
        Outcome alpha = Outcome::from_rank(r, n);
        if (detail::is_majority_optimum_unchecked(m, alpha, limits, stats)) return {true, std::move(alpha)};
    }
    return {};
}

}  // namespace cpnet
