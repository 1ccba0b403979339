#pragma once

// Boolean inputs of the gadget constructions: CNF formulas with 1 to 3
// literals per clause, partial assignments, and two-block quantified formulas
// read as Phi = exists X forall Y not phi(X, Y).

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "cpnet/errors.hpp"

namespace cpnet {

struct Literal {
    std::size_t var = 0;  // 0-based
    bool negated = false;

    bool satisfied_by(bool value) const noexcept { return value != negated; }

    friend bool operator==(const Literal&, const Literal&) = default;
    friend auto operator<=>(const Literal&, const Literal&) = default;
};

inline Literal pos(std::size_t var) { return {var, false}; }
inline Literal neg(std::size_t var) { return {var, true}; }

using Clause = std::vector<Literal>;

inline constexpr std::size_t max_clause_width = 3;

struct CnfFormula {
    std::size_t num_vars = 0;
    std::vector<Clause> clauses;

    void validate() const {
        for (std::size_t j = 0; j < clauses.size(); ++j) {
            const auto& c = clauses[j];
            if (c.empty() || c.size() > max_clause_width) {
                throw InvalidInput("clause " + std::to_string(j + 1) + " must have 1 to 3 literals");
            }
            for (const auto& l : c) {
                if (l.var >= num_vars) {
                    throw InvalidInput("clause " + std::to_string(j + 1) + " uses variable " +
                                       std::to_string(l.var + 1) + " out of range");
                }
            }
        }
    }

    std::size_t literal_count() const noexcept {
        std::size_t n = 0;
        for (const auto& c : clauses) n += c.size();
        return n;
    }

    // Full assignment, one entry per variable.
    bool satisfies(const std::vector<bool>& values) const {
        for (const auto& c : clauses) {
            bool sat = false;
            for (const auto& l : c) {
                if (l.satisfied_by(values.at(l.var))) {
                    sat = true;
                    break;
                }
            }
            if (!sat) return false;
        }
        return true;
    }

    friend bool operator==(const CnfFormula&, const CnfFormula&) = default;
};

// Unmapped variables are undefined.
using PartialAssignment = std::map<std::size_t, bool>;

inline void require_in_range(const PartialAssignment& sigma, std::size_t num_vars) {
    for (const auto& [v, b] : sigma) {
        if (v >= num_vars) throw InvalidInput("assignment to variable " + std::to_string(v + 1) + " out of range");
    }
}

struct Qbf2Formula {
    std::vector<std::size_t> exists_vars;  // X
    std::vector<std::size_t> forall_vars;  // Y
    CnfFormula matrix;

    // X and Y must partition the matrix variables.
    void validate() const {
        matrix.validate();
        std::vector<int> seen(matrix.num_vars, 0);
        for (const auto* block : {&exists_vars, &forall_vars}) {
            for (auto v : *block) {
                if (v >= matrix.num_vars) throw InvalidInput("quantified variable out of range");
                if (seen[v]++) throw InvalidInput("variable " + std::to_string(v + 1) + " quantified twice");
            }
        }
        for (std::size_t v = 0; v < seen.size(); ++v) {
            if (!seen[v]) throw InvalidInput("variable " + std::to_string(v + 1) + " is not quantified");
        }
    }

    bool is_exists(std::size_t var) const {
        for (auto v : exists_vars) {
            if (v == var) return true;
        }
        return false;
    }

    friend bool operator==(const Qbf2Formula&, const Qbf2Formula&) = default;
};

}  // namespace cpnet
