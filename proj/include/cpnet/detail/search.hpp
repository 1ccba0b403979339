#pragma once

// Search machinery shared by the semantics and voting modules: visited-set
// implementations for packed and wide states, and a breadth-first walker over
// the implicit improving-flip graph.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <type_traits>
#include <utility>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cpnet/errors.hpp"
#include "cpnet/model.hpp"

namespace cpnet::detail {

// Dense bitmaps are used up to this many features (2^20 bits = 128 KiB).
inline constexpr std::size_t dense_feature_limit = 20;

inline std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return x;
}

class DenseVisited {
public:
    explicit DenseVisited(std::size_t features)
        : bits_(((std::size_t{1} << features) + 63) / 64, 0) {}

    bool insert(std::uint64_t s) {
        auto& w = bits_[s >> 6];
        const std::uint64_t m = std::uint64_t{1} << (s & 63);
        if (w & m) return false;
        w |= m;
        ++size_;
        return true;
    }
    bool contains(std::uint64_t s) const { return (bits_[s >> 6] >> (s & 63)) & 1U; }
    std::size_t size() const noexcept { return size_; }

private:
    std::vector<std::uint64_t> bits_;
    std::size_t size_ = 0;
};

// Open-addressing hash map from packed states to small payloads.
template <class V>
class FlatMap64 {
public:
    FlatMap64() { rehash(1024); }

    // Returns the payload slot and whether the key was new.
    std::pair<V*, bool> try_emplace(std::uint64_t key) {
        if ((size_ + 1) * 4 > keys_.size() * 3) rehash(keys_.size() * 2);
        std::size_t i = mix64(key) & mask_;
        while (used_[i]) {
            if (keys_[i] == key) return {&values_[i], false};
            i = (i + 1) & mask_;
        }
        used_[i] = 1;
        keys_[i] = key;
        values_[i] = V{};
        ++size_;
        return {&values_[i], true};
    }

    V* find(std::uint64_t key) {
        std::size_t i = mix64(key) & mask_;
        while (used_[i]) {
            if (keys_[i] == key) return &values_[i];
            i = (i + 1) & mask_;
        }
        return nullptr;
    }

    const V* find(std::uint64_t key) const { return const_cast<FlatMap64*>(this)->find(key); }

    std::size_t size() const noexcept { return size_; }

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t i = 0; i < keys_.size(); ++i) {
            if (used_[i]) f(keys_[i], values_[i]);
        }
    }

private:
    void rehash(std::size_t capacity) {
        std::vector<std::uint64_t> keys(capacity);
        std::vector<V> values(capacity);
        std::vector<std::uint8_t> used(capacity, 0);
        const std::size_t mask = capacity - 1;
        for (std::size_t i = 0; i < keys_.size(); ++i) {
            if (!used_[i]) continue;
            std::size_t j = mix64(keys_[i]) & mask;
            while (used[j]) j = (j + 1) & mask;
            used[j] = 1;
            keys[j] = keys_[i];
            values[j] = values_[i];
        }
        keys_ = std::move(keys);
        values_ = std::move(values);
        used_ = std::move(used);
        mask_ = mask;
    }

    std::vector<std::uint64_t> keys_;
    std::vector<V> values_;
    std::vector<std::uint8_t> used_;
    std::size_t mask_ = 0;
    std::size_t size_ = 0;
};

class HashedVisited {
public:
    bool insert(std::uint64_t s) { return map_.try_emplace(s).second; }
    bool contains(std::uint64_t s) const { return map_.find(s) != nullptr; }
    std::size_t size() const noexcept { return map_.size(); }

private:
    struct Empty {};
    FlatMap64<Empty> map_;
};

class WideVisited {
public:
    bool insert(const Outcome& s) { return set_.insert(s).second; }
    bool contains(const Outcome& s) const { return set_.count(s) != 0; }
    std::size_t size() const noexcept { return set_.size(); }

private:
    std::unordered_set<Outcome, OutcomeHash> set_;
};

template <class State>
State to_state(const Outcome& o);

template <>
inline std::uint64_t to_state<std::uint64_t>(const Outcome& o) {
    return o.packed();
}

template <>
inline Outcome to_state<Outcome>(const Outcome& o) {
    return o;
}

inline Outcome to_outcome(std::uint64_t s, std::size_t n) { return Outcome::from_packed(s, n); }
inline Outcome to_outcome(const Outcome& s, std::size_t) { return s; }

// Calls f(State{}, visited) with the cheapest state representation for n
// features. f must return the same type for every instantiation.
template <class F>
decltype(auto) with_state_space(std::size_t n, F&& f) {
    if (n <= dense_feature_limit) {
        DenseVisited v(n);
        return f(std::uint64_t{}, v);
    }
    if (n <= 64) {
        HashedVisited v;
        return f(std::uint64_t{}, v);
    }
    WideVisited v;
    return f(Outcome{}, v);
}

enum class Direction { Forward, Backward };

// Breadth-first walk over improving flips (Forward) or their reversal
// (Backward). Records the discovery tree so shortest witnesses can be read
// back. `on_discover(state, index)` runs once per newly inserted state and
// may return true to stop the walk.
template <class State>
struct Walk {
    std::vector<State> states;
    std::vector<std::uint32_t> parent;
    std::vector<std::uint32_t> feature;
    bool stopped = false;

    // Features flipped along the tree path from the root to node i.
    std::vector<std::size_t> path_to(std::size_t i) const {
        std::vector<std::size_t> out;
        while (i != 0) {
            out.push_back(feature[i]);
            i = parent[i];
        }
        return {out.rbegin(), out.rend()};
    }
};

template <class State, class Visited, class OnDiscover>
Walk<State> walk(const CPNet& net, const State& start, Visited& visited, std::size_t max_states,
                 Direction dir, bool keep_tree, OnDiscover&& on_discover) {
    Walk<State> w;
    const std::size_t n = net.feature_count();
    auto push = [&](const State& s, std::uint32_t parent, std::uint32_t feature) {
        if (w.states.size() >= max_states) throw StateBudgetExceeded(max_states);
        w.states.push_back(s);
        if (keep_tree) {
            w.parent.push_back(parent);
            w.feature.push_back(feature);
        }
    };
    visited.insert(start);
    push(start, 0, 0);
    if (on_discover(start, std::size_t{0})) {
        w.stopped = true;
        return w;
    }
    for (std::size_t head = 0; head < w.states.size(); ++head) {
        const State current = w.states[head];
        for (std::size_t f = 0; f < n; ++f) {
            // Every pair of neighbouring outcomes is joined by exactly one
            // improving flip, so predecessors are the non-improvable features.
            const bool forward_edge = net.improvable(f, current);
            if (forward_edge != (dir == Direction::Forward)) continue;
            State next = current;
            toggle_bit(next, f);
            if (!visited.insert(next)) continue;
            push(next, static_cast<std::uint32_t>(head), static_cast<std::uint32_t>(f));
            if (on_discover(next, w.states.size() - 1)) {
                w.stopped = true;
                return w;
            }
        }
    }
    return w;
}

// Walks everything reachable from `start` with a private visited set and no
// discovery tree. f(state) runs for every discovered state except `start` and
// may return true to stop. Returns the number of states visited and whether
// the walk was stopped.
template <class State, class F>
std::pair<std::size_t, bool> for_each_reachable(const CPNet& net, const State& start, Direction dir,
                                                std::size_t max_states, F&& f) {
    auto run = [&](auto& visited) {
        auto w = walk(net, start, visited, max_states, dir, false, [&](const State& s, std::size_t i) {
            return i != 0 && f(s);
        });
        return std::pair<std::size_t, bool>{w.states.size(), w.stopped};
    };
    if constexpr (std::is_same_v<State, std::uint64_t>) {
        if (net.feature_count() <= dense_feature_limit) {
            DenseVisited v(net.feature_count());
            return run(v);
        }
        HashedVisited v;
        return run(v);
    } else {
        WideVisited v;
        return run(v);
    }
}

// Calls f(State{}) with uint64_t for up to 64 features, Outcome beyond.
template <class F>
decltype(auto) with_state_type(std::size_t n, F&& f) {
    if (n <= 64) return f(std::uint64_t{});
    return f(Outcome{});
}

// Per-state counters. Dense (16-bit) up to `dense_limit` features, hashed
// beyond. Counts must stay below 2^16.
template <class State>
class StateCounter;

template <>
class StateCounter<std::uint64_t> {
public:
    static constexpr std::size_t dense_limit = 24;

    explicit StateCounter(std::size_t features) : dense_(features <= dense_limit) {
        if (dense_) counts_.assign(std::size_t{1} << features, 0);
    }

    std::uint32_t get(std::uint64_t s) const {
        if (dense_) return counts_[s];
        const auto* v = map_.find(s);
        return v ? *v : 0;
    }

    std::uint32_t increment(std::uint64_t s) {
        if (dense_) return ++counts_[s];
        return ++*map_.try_emplace(s).first;
    }

    // Only meaningful in dense mode.
    const std::vector<std::uint16_t>& dense() const noexcept { return counts_; }
    bool is_dense() const noexcept { return dense_; }

private:
    bool dense_;
    std::vector<std::uint16_t> counts_;
    FlatMap64<std::uint32_t> map_;
};

template <>
class StateCounter<Outcome> {
public:
    explicit StateCounter(std::size_t) {}

    std::uint32_t get(const Outcome& s) const {
        auto it = map_.find(s);
        return it == map_.end() ? 0 : it->second;
    }
    std::uint32_t increment(const Outcome& s) { return ++map_[s]; }
    bool is_dense() const noexcept { return false; }
    const std::vector<std::uint16_t>& dense() const noexcept { return empty_; }

private:
    std::unordered_map<Outcome, std::uint32_t, OutcomeHash> map_;
    std::vector<std::uint16_t> empty_;
};

// Cheap structural checks needed for memory safety in the hot paths. Full
// validation (names, acyclicity) is the caller's responsibility.
inline void require_well_formed(const CPNet& net) {
    const std::size_t n = net.feature_count();
    if (net.tables().size() != n) throw InvalidInput("CP-net table count does not match feature count");
    for (std::size_t f = 0; f < n; ++f) {
        const auto& t = net.table(f);
        if (t.parents.size() > max_parents) throw InvalidInput("too many parents at " + net.name(f));
        if (t.preferred.size() != (std::size_t{1} << t.parents.size())) {
            throw InvalidInput("incomplete CP table at " + net.name(f));
        }
        for (auto p : t.parents) {
            if (p >= n) throw InvalidInput("parent index out of range at " + net.name(f));
        }
    }
}

}  // namespace cpnet::detail
