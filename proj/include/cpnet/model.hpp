#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cpnet/errors.hpp"

namespace cpnet {

// Binary feature value. Zero is the plain value f, One the barred value f̄.
enum class Value : std::uint8_t { Zero = 0, One = 1 };

constexpr Value flip(Value v) noexcept { return v == Value::Zero ? Value::One : Value::Zero; }
constexpr Value to_value(bool bit) noexcept { return bit ? Value::One : Value::Zero; }
constexpr bool is_one(Value v) noexcept { return v == Value::One; }

// Largest supported parent set; a table then holds 2^20 rows.
inline constexpr std::size_t max_parents = 20;

// A total assignment of values to the features of a net, indexed by the
// net's canonical feature order. Printed as a bitstring, feature 0 first.
class Outcome {
public:
    Outcome() = default;
    explicit Outcome(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

    static Outcome parse(std::string_view bits) {
        Outcome o(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] == '1') {
                o.set(i, Value::One);
            } else if (bits[i] != '0') {
                throw InvalidInput("outcome bitstring may contain only '0' and '1': \"" +
                                   std::string(bits) + "\"");
            }
        }
        return o;
    }

    // Bit i of `packed` is feature i.
    static Outcome from_packed(std::uint64_t packed, std::size_t size) {
        Outcome o(size);
        if (size > 0) o.words_[0] = size >= 64 ? packed : (packed & ((std::uint64_t{1} << size) - 1));
        return o;
    }

    // The `rank`-th outcome of `size` features in canonical (lexicographic) order.
    static Outcome from_rank(std::uint64_t rank, std::size_t size) {
        Outcome o(size);
        for (std::size_t i = 0; i < size; ++i) {
            if ((rank >> (size - 1 - i)) & 1U) o.set(i, Value::One);
        }
        return o;
    }

    static Outcome all(std::size_t size, Value v) {
        Outcome o(size);
        if (v == Value::One) {
            for (std::size_t i = 0; i < size; ++i) o.set(i, Value::One);
        }
        return o;
    }

    std::size_t size() const noexcept { return size_; }

    Value operator[](std::size_t i) const noexcept { return to_value(test(i)); }
    bool test(std::size_t i) const noexcept { return (words_[i / 64] >> (i % 64)) & 1U; }

    void set(std::size_t i, Value v) noexcept {
        const std::uint64_t mask = std::uint64_t{1} << (i % 64);
        if (v == Value::One) {
            words_[i / 64] |= mask;
        } else {
            words_[i / 64] &= ~mask;
        }
    }

    void toggle(std::size_t i) noexcept { words_[i / 64] ^= std::uint64_t{1} << (i % 64); }

    Outcome with(std::size_t i, Value v) const {
        Outcome o = *this;
        o.set(i, v);
        return o;
    }

    Outcome flipped(std::size_t i) const {
        Outcome o = *this;
        o.toggle(i);
        return o;
    }

    std::uint64_t packed() const {
        if (size_ > 64) throw InstanceTooLarge("outcome has more than 64 features");
        return words_.empty() ? 0 : words_[0];
    }

    std::uint64_t rank() const {
        if (size_ > 64) throw InstanceTooLarge("outcome has more than 64 features");
        std::uint64_t r = 0;
        for (std::size_t i = 0; i < size_; ++i) r = (r << 1) | (test(i) ? 1U : 0U);
        return r;
    }

    std::size_t count_ones() const noexcept {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    std::string to_string() const {
        std::string s(size_, '0');
        for (std::size_t i = 0; i < size_; ++i) {
            if (test(i)) s[i] = '1';
        }
        return s;
    }

    std::span<const std::uint64_t> words() const noexcept { return words_; }

    friend bool operator==(const Outcome&, const Outcome&) = default;

    // Canonical order: shorter first, then lexicographic on the bitstring.
    friend bool operator<(const Outcome& a, const Outcome& b) noexcept {
        if (a.size_ != b.size_) return a.size_ < b.size_;
        for (std::size_t i = 0; i < a.size_; ++i) {
            if (a.test(i) != b.test(i)) return !a.test(i);
        }
        return false;
    }

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

struct OutcomeHash {
    std::size_t operator()(const Outcome& o) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ o.size();
        for (auto w : o.words()) {
            h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

// Bit access shared by packed (uint64_t) and wide (Outcome) search states.
inline bool test_bit(std::uint64_t s, std::size_t i) noexcept { return (s >> i) & 1U; }
inline bool test_bit(const Outcome& s, std::size_t i) noexcept { return s.test(i); }
inline void toggle_bit(std::uint64_t& s, std::size_t i) noexcept { s ^= std::uint64_t{1} << i; }
inline void toggle_bit(Outcome& s, std::size_t i) noexcept { s.toggle(i); }

// Conditional preference table for one feature. Row r holds the preferred
// value under the parent assignment whose k-th parent has value bit k of r.
struct CPTable {
    std::vector<std::size_t> parents;
    std::vector<Value> preferred;

    template <class State>
    std::size_t row_index(const State& s) const noexcept {
        std::size_t r = 0;
        for (std::size_t k = 0; k < parents.size(); ++k) {
            r |= static_cast<std::size_t>(test_bit(s, parents[k])) << k;
        }
        return r;
    }

    template <class State>
    Value preferred_at(const State& s) const noexcept {
        return preferred[row_index(s)];
    }

    friend bool operator==(const CPTable&, const CPTable&) = default;
};

// Acyclic binary CP-net. Construction never throws; use validate_net to learn
// whether the definitional constraints hold.
class CPNet {
public:
    CPNet() = default;
    CPNet(std::vector<std::string> names, std::vector<CPTable> tables)
        : names_(std::move(names)), tables_(std::move(tables)) {}

    std::size_t feature_count() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::string& name(std::size_t f) const { return names_.at(f); }
    const std::vector<CPTable>& tables() const noexcept { return tables_; }
    const CPTable& table(std::size_t f) const { return tables_.at(f); }

    std::optional<std::size_t> find(std::string_view name) const {
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i] == name) return i;
        }
        return std::nullopt;
    }

    std::size_t index_of(std::string_view name) const {
        if (auto f = find(name)) return *f;
        throw InvalidInput("unknown feature \"" + std::string(name) + "\"");
    }

    // (parent, child) pairs, ordered by child then by declared parent order.
    std::vector<std::pair<std::size_t, std::size_t>> edges() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t f = 0; f < tables_.size(); ++f) {
            for (auto p : tables_[f].parents) out.emplace_back(p, f);
        }
        return out;
    }

    template <class State>
    Value preferred(std::size_t f, const State& s) const noexcept {
        return tables_[f].preferred_at(s);
    }

    // True iff flipping f in s is an improving flip.
    template <class State>
    bool improvable(std::size_t f, const State& s) const noexcept {
        return is_one(tables_[f].preferred_at(s)) != test_bit(s, f);
    }

    // Optional display labels for the two values of each feature.
    const std::vector<std::array<std::string, 2>>& value_labels() const noexcept { return labels_; }
    void set_value_labels(std::vector<std::array<std::string, 2>> labels) { labels_ = std::move(labels); }

    friend bool operator==(const CPNet& a, const CPNet& b) {
        return a.names_ == b.names_ && a.tables_ == b.tables_;
    }

private:
    std::vector<std::string> names_;
    std::vector<CPTable> tables_;
    std::vector<std::array<std::string, 2>> labels_;
};

// Profile of agent nets over one shared feature universe.
class MCPNet {
public:
    MCPNet() = default;
    explicit MCPNet(std::vector<CPNet> agents) : agents_(std::move(agents)) {}

    std::size_t agent_count() const noexcept { return agents_.size(); }
    const std::vector<CPNet>& agents() const noexcept { return agents_; }
    const CPNet& agent(std::size_t i) const { return agents_.at(i); }
    std::size_t feature_count() const noexcept {
        return agents_.empty() ? 0 : agents_.front().feature_count();
    }
    const std::vector<std::string>& names() const { return agents_.at(0).names(); }

    friend bool operator==(const MCPNet&, const MCPNet&) = default;

private:
    std::vector<CPNet> agents_;
};

// ---------------------------------------------------------------------------
// Validation

struct Violation {
    enum class Kind {
        DuplicateName,
        EmptyName,
        TableCountMismatch,
        ParentOutOfRange,
        DuplicateParent,
        SelfLoop,
        Cycle,
        IncompleteTable,
        TooManyParents,
        NoAgents,
        FeatureMismatch,
    };

    Kind kind;
    std::string feature;
    std::string message;
};

inline std::string_view to_string(Violation::Kind k) {
    switch (k) {
        case Violation::Kind::DuplicateName: return "duplicate-name";
        case Violation::Kind::EmptyName: return "empty-name";
        case Violation::Kind::TableCountMismatch: return "table-count-mismatch";
        case Violation::Kind::ParentOutOfRange: return "parent-out-of-range";
        case Violation::Kind::DuplicateParent: return "duplicate-parent";
        case Violation::Kind::SelfLoop: return "cycle";
        case Violation::Kind::Cycle: return "cycle";
        case Violation::Kind::IncompleteTable: return "incomplete-table";
        case Violation::Kind::TooManyParents: return "too-many-parents";
        case Violation::Kind::NoAgents: return "no-agents";
        case Violation::Kind::FeatureMismatch: return "feature-mismatch";
    }
    return "unknown";
}

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }

    bool has(Violation::Kind k) const {
        return std::any_of(violations.begin(), violations.end(),
                           [k](const Violation& v) { return v.kind == k; });
    }

    std::string summary() const {
        std::string s;
        for (const auto& v : violations) {
            if (!s.empty()) s += "; ";
            s += std::string(to_string(v.kind)) + " at " + v.feature + ": " + v.message;
        }
        return s;
    }
};

namespace detail {

// Kahn's algorithm with the smallest ready index first. Returns the order
// and whether every feature was placed. Out-of-range parents are skipped.
inline std::pair<std::vector<std::size_t>, bool> kahn_order(const CPNet& net) {
    const std::size_t n = net.feature_count();
    std::vector<std::size_t> pending(n, 0);
    std::vector<std::vector<std::size_t>> children(n);
    for (std::size_t f = 0; f < n && f < net.tables().size(); ++f) {
        for (auto p : net.table(f).parents) {
            if (p >= n) continue;
            ++pending[f];
            children[p].push_back(f);
        }
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t f = 0; f < n; ++f) {
        if (pending[f] == 0) ready.push(f);
    }
    std::vector<std::size_t> order;
    order.reserve(n);
    while (!ready.empty()) {
        const auto f = ready.top();
        ready.pop();
        order.push_back(f);
        for (auto c : children[f]) {
            if (--pending[c] == 0) ready.push(c);
        }
    }
    const bool complete = order.size() == n;
    return {std::move(order), complete};
}

}  // namespace detail

inline ValidationReport validate_net(const CPNet& net) {
    ValidationReport report;
    auto add = [&](Violation::Kind k, std::string feature, std::string msg) {
        report.violations.push_back({k, std::move(feature), std::move(msg)});
    };
    const std::size_t n = net.feature_count();
    auto label = [&](std::size_t f) { return f < n ? net.name(f) : "#" + std::to_string(f); };

    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t f = 0; f < n; ++f) {
        if (net.name(f).empty()) add(Violation::Kind::EmptyName, label(f), "feature name is empty");
        if (!seen.emplace(net.name(f), f).second) {
            add(Violation::Kind::DuplicateName, net.name(f), "name used by more than one feature");
        }
    }
    if (net.tables().size() != n) {
        add(Violation::Kind::TableCountMismatch, "<net>",
            std::to_string(net.tables().size()) + " tables for " + std::to_string(n) + " features");
    }
    const std::size_t tables = std::min(n, net.tables().size());
    bool structural_ok = true;
    for (std::size_t f = 0; f < tables; ++f) {
        const auto& t = net.table(f);
        std::vector<std::size_t> sorted = t.parents;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            add(Violation::Kind::DuplicateParent, label(f), "parent listed twice");
        }
        for (auto p : t.parents) {
            if (p >= n) {
                add(Violation::Kind::ParentOutOfRange, label(f),
                    "parent index " + std::to_string(p) + " out of range");
                structural_ok = false;
            } else if (p == f) {
                add(Violation::Kind::SelfLoop, label(f), "feature is its own parent");
            }
        }
        if (t.parents.size() > max_parents) {
            add(Violation::Kind::TooManyParents, label(f),
                std::to_string(t.parents.size()) + " parents exceed the limit of " +
                    std::to_string(max_parents));
            continue;
        }
        const std::size_t rows = std::size_t{1} << t.parents.size();
        if (t.preferred.size() != rows) {
            add(Violation::Kind::IncompleteTable, label(f),
                "table has " + std::to_string(t.preferred.size()) + " rows, needs " +
                    std::to_string(rows));
        }
    }
    if (structural_ok && net.tables().size() == n && !report.has(Violation::Kind::SelfLoop)) {
        auto [order, complete] = detail::kahn_order(net);
        if (!complete) {
            std::vector<bool> placed(n, false);
            for (auto f : order) placed[f] = true;
            for (std::size_t f = 0; f < n; ++f) {
                if (!placed[f]) {
                    add(Violation::Kind::Cycle, net.name(f), "feature lies on or below a cycle");
                    break;
                }
            }
        }
    }
    return report;
}

inline ValidationReport validate_profile(const MCPNet& m) {
    ValidationReport report;
    if (m.agent_count() == 0) {
        report.violations.push_back({Violation::Kind::NoAgents, "<profile>", "profile has no agents"});
        return report;
    }
    for (std::size_t i = 0; i < m.agent_count(); ++i) {
        const auto& agent = m.agent(i);
        if (agent.names() != m.agent(0).names()) {
            report.violations.push_back({Violation::Kind::FeatureMismatch, "agent " + std::to_string(i),
                                         "feature list differs from agent 0"});
        }
        for (auto v : validate_net(agent).violations) {
            v.feature = "agent " + std::to_string(i) + "/" + v.feature;
            report.violations.push_back(std::move(v));
        }
    }
    return report;
}

inline void require_valid(const CPNet& net) {
    auto report = validate_net(net);
    if (report.has(Violation::Kind::Cycle) || report.has(Violation::Kind::SelfLoop)) {
        throw CycleDetected("invalid CP-net: " + report.summary());
    }
    if (!report.ok()) throw InvalidInput("invalid CP-net: " + report.summary());
}

inline void require_valid(const MCPNet& m) {
    auto report = validate_profile(m);
    if (!report.ok()) throw InvalidInput("invalid mCP-net: " + report.summary());
}

inline void require_dimension(const CPNet& net, const Outcome& o) {
    if (o.size() != net.feature_count()) {
        throw InvalidInput("outcome has " + std::to_string(o.size()) + " values but the net has " +
                           std::to_string(net.feature_count()) + " features");
    }
}

// Parents before children; ties go to the smallest canonical index.
inline std::vector<std::size_t> topological_order(const CPNet& net) {
    for (std::size_t f = 0; f < net.tables().size(); ++f) {
        for (auto p : net.table(f).parents) {
            if (p >= net.feature_count()) throw InvalidInput("parent index out of range at " + net.name(f));
        }
    }
    if (net.tables().size() != net.feature_count()) throw InvalidInput("table count mismatch");
    auto [order, complete] = detail::kahn_order(net);
    if (!complete) throw CycleDetected("CP-net dependency graph has a cycle");
    return order;
}

inline std::size_t indegree(const CPNet& net) {
    std::size_t d = 0;
    for (const auto& t : net.tables()) d = std::max(d, t.parents.size());
    return d;
}

inline std::size_t indegree(const MCPNet& m) {
    std::size_t d = 0;
    for (const auto& a : m.agents()) d = std::max(d, indegree(a));
    return d;
}

// ---------------------------------------------------------------------------
// Construction helper: tables given as rules are expanded into full rows.

class NetBuilder {
public:
    using Rule = std::function<Value(std::span<const Value>)>;

    NetBuilder() = default;
    explicit NetBuilder(std::vector<std::string> names)
        : names_(std::move(names)), tables_(names_.size()), set_(names_.size(), false) {}

    std::size_t add(std::string name) {
        names_.push_back(std::move(name));
        tables_.emplace_back();
        set_.push_back(false);
        return names_.size() - 1;
    }

    std::size_t size() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }

    NetBuilder& unconditional(std::size_t f, Value preferred) {
        return assign(f, CPTable{{}, {preferred}});
    }

    NetBuilder& conditional(std::size_t f, std::vector<std::size_t> parents, const Rule& rule) {
        if (parents.size() > max_parents) throw InvalidInput("too many parents for " + names_.at(f));
        CPTable t;
        t.parents = std::move(parents);
        const std::size_t rows = std::size_t{1} << t.parents.size();
        t.preferred.resize(rows);
        std::vector<Value> cond(t.parents.size());
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t k = 0; k < cond.size(); ++k) cond[k] = to_value((r >> k) & 1U);
            t.preferred[r] = rule(cond);
        }
        return assign(f, std::move(t));
    }

    NetBuilder& assign(std::size_t f, CPTable t) {
        tables_.at(f) = std::move(t);
        set_.at(f) = true;
        return *this;
    }

    bool has_table(std::size_t f) const { return set_.at(f); }

    CPNet build() const {
        for (std::size_t f = 0; f < names_.size(); ++f) {
            if (!set_[f]) throw InvalidInput("no CP table given for feature " + names_[f]);
        }
        return CPNet(names_, tables_);
    }

private:
    std::vector<std::string> names_;
    std::vector<CPTable> tables_;
    std::vector<bool> set_;
};

// Rules used throughout the gadget constructions.
namespace rules {

inline NetBuilder::Rule all_one(Value then, Value otherwise) {
    return [=](std::span<const Value> c) {
        return std::all_of(c.begin(), c.end(), is_one) ? then : otherwise;
    };
}

inline NetBuilder::Rule any_one(Value then, Value otherwise) {
    return [=](std::span<const Value> c) {
        return std::any_of(c.begin(), c.end(), is_one) ? then : otherwise;
    };
}

// Matches when every parent takes the given pattern value.
inline NetBuilder::Rule pattern(std::vector<Value> want, Value then, Value otherwise) {
    return [want = std::move(want), then, otherwise](std::span<const Value> c) {
        return std::equal(c.begin(), c.end(), want.begin(), want.end()) ? then : otherwise;
    };
}

}  // namespace rules

}  // namespace cpnet
