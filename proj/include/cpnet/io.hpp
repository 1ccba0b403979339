#pragma once

// Serialization: JSON nets and profiles, outcomes in bit or named form,
// DIMACS CNF and a QDIMACS subset with one "e" and one "a" block.

#include <array>
#include <cstddef>
#include <istream>
#include <stdexcept>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cpnet/errors.hpp"
#include "cpnet/formula.hpp"
#include "cpnet/model.hpp"

namespace cpnet::io {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline const json& member(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw InvalidInput(where + ": missing \"" + key + "\"");
    return j.at(key);
}

using Labels = std::array<std::string, 2>;

// 0, 1, or one of the feature's two value labels.
inline Value read_value(const json& j, const Labels& labels, const std::string& where) {
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == labels[0]) return Value::Zero;
        if (s == labels[1]) return Value::One;
        throw InvalidInput(where + ": unknown value \"" + s + "\"");
    }
    if (!j.is_number_integer() || (j.get<int>() != 0 && j.get<int>() != 1)) {
        throw InvalidInput(where + ": values must be 0, 1 or a value label");
    }
    return to_value(j.get<int>() == 1);
}

inline Labels read_labels(const json& f, const std::string& where) {
    if (!f.contains("values")) return {"0", "1"};
    const auto& v = f.at("values");
    if (!v.is_array() || v.size() != 2 || !v[0].is_string() || !v[1].is_string() || v[0] == v[1]) {
        throw InvalidInput(where + ": \"values\" must be two distinct strings");
    }
    return {v[0].get<std::string>(), v[1].get<std::string>()};
}

}  // namespace detail

// Tables whose rows do not cover every parent assignment are kept in file
// order so that validate_net can report them.
inline CPNet net_from_json(const json& j) {
    const auto& features = detail::member(j, "features", "net");
    if (!features.is_array()) throw InvalidInput("net: \"features\" must be an array");
    std::vector<std::string> names;
    for (const auto& f : features) {
        const auto& name = detail::member(f, "name", "feature");
        if (!name.is_string()) throw InvalidInput("feature: \"name\" must be a string");
        names.push_back(name.get<std::string>());
    }
    CPNet probe(names, {});
    std::vector<CPTable> tables;
    std::vector<detail::Labels> labels;
    bool any_labels = false;
    for (std::size_t i = 0; i < features.size(); ++i) {
        labels.push_back(detail::read_labels(features[i], "feature " + names[i]));
        any_labels |= features[i].contains("values");
    }
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& f = features[i];
        const std::string where = "feature " + names[i];
        CPTable t;
        if (f.contains("parents")) {
            if (!f.at("parents").is_array()) throw InvalidInput(where + ": \"parents\" must be an array");
            for (const auto& p : f.at("parents")) {
                if (!p.is_string()) throw InvalidInput(where + ": parents are given by name");
                auto idx = probe.find(p.get<std::string>());
                if (!idx) throw InvalidInput(where + ": unknown parent \"" + p.get<std::string>() + "\"");
                t.parents.push_back(*idx);
            }
        }
        if (t.parents.size() > max_parents) throw InvalidInput(where + ": more than 20 parents");
        const auto& cpt = detail::member(f, "cpt", where);
        if (!cpt.is_array()) throw InvalidInput(where + ": \"cpt\" must be an array");
        const std::size_t rows = std::size_t{1} << t.parents.size();
        std::vector<int> seen(rows, 0);
        std::vector<Value> by_row(rows, Value::Zero);
        std::vector<Value> in_order;
        for (const auto& row : cpt) {
            const auto& cond = detail::member(row, "cond", where);
            if (!cond.is_array() || cond.size() != t.parents.size()) {
                throw InvalidInput(where + ": each \"cond\" must list one value per parent");
            }
            std::size_t r = 0;
            for (std::size_t k = 0; k < cond.size(); ++k) {
                if (is_one(detail::read_value(cond[k], labels[t.parents[k]], where))) r |= std::size_t{1} << k;
            }
            if (seen[r]++) throw InvalidInput(where + ": duplicate CP table row");
            const Value v = detail::read_value(detail::member(row, "prefer", where), labels[i], where);
            by_row[r] = v;
            in_order.push_back(v);
        }
        t.preferred = in_order.size() == rows ? by_row : in_order;
        tables.push_back(std::move(t));
    }
    CPNet net(std::move(names), std::move(tables));
    if (any_labels) net.set_value_labels(std::move(labels));
    return net;
}

inline json to_json(const CPNet& net) {
    json features = json::array();
    for (std::size_t f = 0; f < net.feature_count(); ++f) {
        const auto& t = net.table(f);
        json parents = json::array();
        for (auto p : t.parents) parents.push_back(net.name(p));
        json cpt = json::array();
        for (std::size_t r = 0; r < t.preferred.size(); ++r) {
            json cond = json::array();
            for (std::size_t k = 0; k < t.parents.size(); ++k) cond.push_back((r >> k) & 1U);
            cpt.push_back({{"cond", cond}, {"prefer", is_one(t.preferred[r]) ? 1 : 0}});
        }
        json entry = {{"name", net.name(f)}, {"parents", parents}, {"cpt", cpt}};
        if (!net.value_labels().empty()) entry["values"] = net.value_labels()[f];
        features.push_back(std::move(entry));
    }
    return {{"features", features}};
}

inline MCPNet profile_from_json(const json& j) {
    const auto& agents = detail::member(j, "agents", "mCP-net");
    if (!agents.is_array()) throw InvalidInput("mCP-net: \"agents\" must be an array");
    std::vector<CPNet> nets;
    for (const auto& a : agents) nets.push_back(net_from_json(a));
    return MCPNet(std::move(nets));
}

inline json to_json(const MCPNet& m) {
    json agents = json::array();
    for (const auto& a : m.agents()) agents.push_back(to_json(a));
    return {{"agents", agents}};
}

inline json parse_json(std::string_view text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidInput(source + ": " + e.what());
    }
}

inline CPNet read_net(std::string_view text, const std::string& source = "net") {
    return net_from_json(parse_json(text, source));
}

inline MCPNet read_profile(std::string_view text, const std::string& source = "mCP-net") {
    return profile_from_json(parse_json(text, source));
}

// ---------------------------------------------------------------------------
// Outcomes

// "Main=m,Wine=r": every feature exactly once; values are 0, 1 or one of the
// feature's value labels.
inline Outcome parse_named_outcome(std::string_view text, const CPNet& net) {
    Outcome o(net.feature_count());
    std::vector<int> seen(net.feature_count(), 0);
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string_view::npos) end = text.size();
        auto item = text.substr(start, end - start);
        auto eq = item.find('=');
        if (eq == std::string_view::npos) throw InvalidInput("named outcome: expected Feature=value, got \"" + std::string(item) + "\"");
        const std::size_t f = net.index_of(item.substr(0, eq));
        const auto value = item.substr(eq + 1);
        if (seen[f]++) throw InvalidInput("named outcome: feature " + net.name(f) + " given twice");
        if (value == "0" || value == "1") {
            o.set(f, to_value(value == "1"));
        } else if (!net.value_labels().empty() && value == net.value_labels()[f][0]) {
            o.set(f, Value::Zero);
        } else if (!net.value_labels().empty() && value == net.value_labels()[f][1]) {
            o.set(f, Value::One);
        } else {
            throw InvalidInput("named outcome: unknown value \"" + std::string(value) + "\" for " + net.name(f));
        }
        start = end + 1;
    }
    for (std::size_t f = 0; f < seen.size(); ++f) {
        if (!seen[f]) throw InvalidInput("named outcome: no value for " + net.name(f));
    }
    return o;
}

inline Outcome parse_outcome(std::string_view text, const CPNet& net, bool named = false) {
    Outcome o = named ? parse_named_outcome(text, net) : Outcome::parse(text);
    require_dimension(net, o);
    return o;
}

inline std::string named_outcome(const Outcome& o, const CPNet& net) {
    std::string s;
    for (std::size_t f = 0; f < o.size(); ++f) {
        if (f) s += ",";
        s += net.name(f) + "=";
        s += net.value_labels().empty() ? (o.test(f) ? "1" : "0") : net.value_labels()[f][o.test(f) ? 1 : 0];
    }
    return s;
}

// ---------------------------------------------------------------------------
// DIMACS

namespace detail {

struct DimacsParse {
    std::size_t vars = 0;
    std::vector<Clause> clauses;
    std::vector<std::size_t> exists;
    std::vector<std::size_t> forall;
    bool saw_quantifier = false;
};

inline long to_long(const std::string& tok, const std::string& where) {
    try {
        std::size_t used = 0;
        long v = std::stol(tok, &used);
        if (used != tok.size()) throw InvalidInput(where + ": bad number \"" + tok + "\"");
        return v;
    } catch (const std::logic_error&) {
        throw InvalidInput(where + ": bad number \"" + tok + "\"");
    }
}

inline DimacsParse parse_dimacs(std::istream& in, bool quantified) {
    DimacsParse d;
    bool header = false;
    std::size_t declared_clauses = 0;
    Clause current;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = "line " + std::to_string(lineno);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "c" || tok[0] == 'c') continue;
        if (tok == "%") break;
        if (tok == "p") {
            std::string fmt, nv, nc;
            if (header || !(ls >> fmt >> nv >> nc) || fmt != "cnf") throw InvalidInput(where + ": bad problem line");
            const long v = to_long(nv, where), c = to_long(nc, where);
            if (v < 0 || c < 0) throw InvalidInput(where + ": negative counts");
            d.vars = static_cast<std::size_t>(v);
            declared_clauses = static_cast<std::size_t>(c);
            header = true;
            continue;
        }
        if (!header) throw InvalidInput(where + ": clause before problem line");
        if (tok == "e" || tok == "a") {
            if (!quantified) throw InvalidInput(where + ": quantifier line in plain DIMACS");
            if (!d.clauses.empty() || !current.empty()) throw InvalidInput(where + ": quantifier after clauses");
            auto& block = tok == "e" ? d.exists : d.forall;
            d.saw_quantifier = true;
            std::string v;
            bool closed = false;
            while (ls >> v) {
                const long x = to_long(v, where);
                if (x == 0) {
                    closed = true;
                    break;
                }
                if (x < 0 || static_cast<std::size_t>(x) > d.vars) throw InvalidInput(where + ": variable out of range");
                block.push_back(static_cast<std::size_t>(x - 1));
            }
            if (!closed) throw InvalidInput(where + ": quantifier line must end with 0");
            continue;
        }
        do {
            const long x = to_long(tok, where);
            if (x == 0) {
                if (current.empty()) throw InvalidInput(where + ": empty clause");
                d.clauses.push_back(std::move(current));
                current.clear();
                continue;
            }
            const std::size_t var = static_cast<std::size_t>(x < 0 ? -x : x);
            if (var > d.vars) throw InvalidInput(where + ": variable " + std::to_string(var) + " out of range");
            current.push_back({var - 1, x < 0});
        } while (ls >> tok);
    }
    if (!header) throw InvalidInput("missing problem line");
    if (!current.empty()) d.clauses.push_back(std::move(current));
    if (d.clauses.size() != declared_clauses) {
        throw InvalidInput("problem line declares " + std::to_string(declared_clauses) + " clauses, found " +
                           std::to_string(d.clauses.size()));
    }
    return d;
}

}  // namespace detail

inline CnfFormula read_dimacs(std::istream& in) {
    auto d = detail::parse_dimacs(in, false);
    CnfFormula phi{d.vars, std::move(d.clauses)};
    phi.validate();
    return phi;
}

inline CnfFormula read_dimacs(std::string_view text) {
    std::istringstream in{std::string(text)};
    return read_dimacs(in);
}

// Variables not listed in any block are existential.
inline Qbf2Formula read_qdimacs(std::istream& in) {
    auto d = detail::parse_dimacs(in, true);
    Qbf2Formula q;
    q.matrix = CnfFormula{d.vars, std::move(d.clauses)};
    q.forall_vars = d.forall;
    std::vector<int> listed(d.vars, 0);
    for (auto v : d.forall) listed[v] = 1;
    q.exists_vars = d.exists;
    for (auto v : d.exists) listed[v] = 1;
    for (std::size_t v = 0; v < d.vars; ++v) {
        if (!listed[v]) q.exists_vars.push_back(v);
    }
    q.validate();
    return q;
}

inline Qbf2Formula read_qdimacs(std::string_view text) {
    std::istringstream in{std::string(text)};
    return read_qdimacs(in);
}

inline std::string to_dimacs(const CnfFormula& phi) {
    std::ostringstream out;
    out << "p cnf " << phi.num_vars << " " << phi.clauses.size() << "\n";
    for (const auto& c : phi.clauses) {
        for (const auto& l : c) out << (l.negated ? "-" : "") << l.var + 1 << " ";
        out << "0\n";
    }
    return out.str();
}

}  // namespace cpnet::io
