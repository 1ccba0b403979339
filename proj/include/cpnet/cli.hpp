#pragma once

// Command-line front end. run() parses arguments, answers one query and
// prints a JSON object. Exit codes: 0 answered, 2 invalid input, 3 instance
// too large or state budget exceeded.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpnet/errors.hpp"
#include "cpnet/formula.hpp"
#include "cpnet/gadgets.hpp"
#include "cpnet/io.hpp"
#include "cpnet/model.hpp"
#include "cpnet/oracle.hpp"
#include "cpnet/semantics.hpp"
#include "cpnet/voting.hpp"

namespace cpnet::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 2;
inline constexpr int exit_too_large = 3;

namespace detail {

using json = nlohmann::json;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline CPNet load_net(const std::string& path) {
    auto j = io::parse_json(read_file(path), path);
    return io::net_from_json(j);
}

inline MCPNet load_profile(const std::string& path) { return io::read_profile(read_file(path), path); }

inline CnfFormula load_cnf(const std::string& path) {
    std::istringstream in(read_file(path));
    return io::read_dimacs(in);
}

inline Qbf2Formula load_qbf(const std::string& path) {
    std::istringstream in(read_file(path));
    return io::read_qdimacs(in);
}

inline json witness_json(const FlipSequence& seq, const CPNet& net) {
    json steps = json::array();
    for (const auto& s : seq.steps) {
        steps.push_back({{"feature", net.name(s.feature)},
                         {"index", s.feature},
                         {"from", is_one(s.from) ? 1 : 0},
                         {"to", is_one(s.to) ? 1 : 0}});
    }
    return {{"start", seq.start.to_string()}, {"end", seq.end.to_string()}, {"steps", steps}};
}

inline json violations_json(const ValidationReport& r) {
    json out = json::array();
    for (const auto& v : r.violations) {
        out.push_back({{"kind", std::string(to_string(v.kind))}, {"feature", v.feature}, {"message", v.message}});
    }
    return out;
}

struct Options {
    std::size_t max_states = std::size_t{1} << 24;
    std::size_t oracle_bound = 14;
    std::size_t max_enumeration = 14;
    bool named = false;
};

class Runner {
public:
    Runner(std::ostream& out, const Options& opt) : out_(out), opt_(opt), start_(std::chrono::steady_clock::now()) {}

    SearchLimits search() const { return {opt_.max_states}; }

    VotingLimits voting() const {
        VotingLimits v;
        v.max_states = opt_.max_states;
        v.max_enumeration_features = opt_.max_enumeration;
        return v;
    }

    oracle::OracleLimits oracle_limits() const {
        oracle::OracleLimits l;
        l.max_features = opt_.oracle_bound;
        l.max_states = opt_.max_states;
        return l;
    }

    Outcome outcome(const std::string& text, const CPNet& net) const { return io::parse_outcome(text, net, opt_.named); }

    std::size_t& visited() { return visited_; }

    void answer(json body) {
        const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
        body["stats"] = {{"visited", visited_}, {"wall_ms", ms}};
        out_ << body.dump() << "\n";
    }

    void raw(const std::string& text) { out_ << text; }

private:
    std::ostream& out_;
    Options opt_;
    std::chrono::steady_clock::time_point start_;
    std::size_t visited_ = 0;
};

inline json existence_json(const ExistenceAnswer& a) {
    return {{"answer", a.exists}, {"witness", a.witness ? json(a.witness->to_string()) : json(nullptr)}};
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    using detail::json;
    CLI::App app{"CP-net and mCP-net reasoning", "cpnet"};
    app.require_subcommand(1);
    detail::Options opt;
    app.add_option("--max-states", opt.max_states, "state budget per search")->capture_default_str();
    app.add_option("--oracle-bound", opt.oracle_bound, "largest feature count for explicit graphs")
        ->capture_default_str();
    app.add_option("--max-enum", opt.max_enumeration, "largest feature count for exhaustive candidate loops")
        ->capture_default_str();
    app.add_flag("--named", opt.named, "outcomes given as Feature=value lists");

    std::string file, first, second;

    auto* validate = app.add_subcommand("validate", "check a net or an mCP-net");
    validate->add_option("file", file)->required();

    auto* optimum = app.add_subcommand("optimum", "optimum outcome by forward sweep");
    optimum->add_option("net", file)->required();

    auto* is_opt = app.add_subcommand("is-optimal", "no improving flip at the outcome");
    is_opt->add_option("net", file)->required();
    is_opt->add_option("outcome", first)->required();

    bool want_witness = false;
    auto* dom = app.add_subcommand("dominates", "does beta dominate alpha");
    dom->add_option("net", file)->required();
    dom->add_option("beta", first)->required();
    dom->add_option("alpha", second)->required();
    dom->add_flag("--witness", want_witness, "print a shortest improving flip sequence");

    auto* inc = app.add_subcommand("incomparable", "neither outcome dominates the other");
    inc->add_option("net", file)->required();
    inc->add_option("a", first)->required();
    inc->add_option("b", second)->required();

    auto* part = app.add_subcommand("partition", "agents preferring, opposing, or undecided on beta over alpha");
    part->add_option("mcp", file)->required();
    part->add_option("beta", first)->required();
    part->add_option("alpha", second)->required();

    struct VotingCommands {
        CLI::App* dominates;
        CLI::App* is_optimal;
        CLI::App* is_optimum;
        CLI::App* exists_optimal;
        CLI::App* exists_optimum;
    };
    auto voting = [&](const std::string& name) {
        auto* v = app.add_subcommand(name, name + " voting semantics");
        v->require_subcommand(1);
        VotingCommands c{};
        c.dominates = v->add_subcommand("dominates");
        c.dominates->add_option("mcp", file)->required();
        c.dominates->add_option("beta", first)->required();
        c.dominates->add_option("alpha", second)->required();
        c.is_optimal = v->add_subcommand("is-optimal");
        c.is_optimal->add_option("mcp", file)->required();
        c.is_optimal->add_option("alpha", first)->required();
        c.is_optimum = v->add_subcommand("is-optimum");
        c.is_optimum->add_option("mcp", file)->required();
        c.is_optimum->add_option("alpha", first)->required();
        c.exists_optimal = v->add_subcommand("exists-optimal");
        c.exists_optimal->add_option("mcp", file)->required();
        c.exists_optimum = v->add_subcommand("exists-optimum");
        c.exists_optimum->add_option("mcp", file)->required();
        return c;
    };
    auto pareto = voting("pareto");
    auto majority = voting("majority");

    std::string cnf, qbf, bits;
    std::size_t m = 0;
    bool with_outcomes = false;
    auto* gadget = app.add_subcommand("gadget", "generate reduction nets as JSON");
    gadget->require_subcommand(1);
    auto gadget_cmd = [&](const std::string& name, const std::string& desc) {
        auto* g = gadget->add_subcommand(name, desc);
        g->add_flag("--outcomes", with_outcomes, "wrap the net together with its distinguished outcomes");
        return g;
    };
    auto* g_formula = gadget_cmd("formula-net", "formula net F(phi)");
    g_formula->add_option("--cnf", cnf)->required();
    auto* g_summ = gadget_cmd("summarized", "summarized formula net F_s(phi)");
    g_summ->add_option("--cnf", cnf)->required();
    auto* g_hc = gadget_cmd("hc", "conjunctive interconnecting net H_C(m)");
    g_hc->add_option("-m", m)->required();
    auto* g_hd = gadget_cmd("hd", "disjunctive interconnecting net H_D(m)");
    g_hd->add_option("-m", m)->required();
    auto* g_direct = gadget_cmd("direct", "direct net D(alpha)");
    g_direct->add_option("--outcome", bits)->required();
    auto* g_ipo = gadget_cmd("m-ipo", "2-agent profile M_ipo(phi)");
    g_ipo->add_option("--cnf", cnf)->required();
    auto* g_eml = gadget_cmd("m-eml", "6-agent profile M_eml(Phi)");
    g_eml->add_option("--qbf", qbf)->required();
    auto* g_imm = gadget_cmd("m-imm", "3-agent profile M_imm(Phi)");
    g_imm->add_option("--qbf", qbf)->required();
    auto* g_nowin = gadget_cmd("m-nowin", "4-agent profile without majority winners");

    bool dot = false;
    std::string lemma;
    auto* orc = app.add_subcommand("oracle", "brute-force ground truth");
    orc->require_subcommand(1);
    auto* o_graph = orc->add_subcommand("graph", "extended preference graph");
    o_graph->add_option("net", file)->required();
    o_graph->add_flag("--dot", dot, "print Graphviz DOT instead of JSON");
    auto* o_closure = orc->add_subcommand("closure", "dominance closure as (beta, alpha) pairs");
    o_closure->add_option("net", file)->required();
    auto* o_check = orc->add_subcommand("check", "compare the search engine with the closure on all pairs");
    o_check->add_option("net", file)->required();
    auto* o_verify = orc->add_subcommand("verify", "check a lemma on one instance");
    o_verify->add_option("--lemma", lemma)->required()->check(CLI::IsMember(std::vector<std::string>(
        oracle::lemma_tags().begin(), oracle::lemma_tags().end())));
    o_verify->add_option("--cnf", cnf);
    o_verify->add_option("mcp", file);
    auto* o_sat = orc->add_subcommand("sat", "satisfiability by enumeration");
    o_sat->add_option("--cnf", cnf)->required();
    auto* o_qbf = orc->add_subcommand("qbf", "validity of exists X forall Y not phi by enumeration");
    o_qbf->add_option("--qbf", qbf)->required();

    std::vector<std::string> argv_store{"cpnet"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_invalid;
    }

    detail::Runner r(out, opt);
    auto& visited = r.visited();
    try {
        if (validate->parsed()) {
            auto j = io::parse_json(detail::read_file(file), file);
            const auto report = j.contains("agents") ? validate_profile(io::profile_from_json(j))
                                                     : validate_net(io::net_from_json(j));
            r.answer({{"answer", report.ok()}, {"violations", detail::violations_json(report)}});
        } else if (optimum->parsed()) {
            auto net = detail::load_net(file);
            require_valid(net);
            r.answer({{"answer", forward_sweep_optimum(net).to_string()}});
        } else if (is_opt->parsed()) {
            auto net = detail::load_net(file);
            require_valid(net);
            r.answer({{"answer", is_optimal(net, r.outcome(first, net))}});
        } else if (dom->parsed()) {
            auto net = detail::load_net(file);
            require_valid(net);
            auto a = dominates(net, r.outcome(first, net), r.outcome(second, net), r.search());
            visited += a.visited;
            json body{{"answer", a.holds}};
            if (want_witness) body["witness"] = a.witness ? detail::witness_json(*a.witness, net) : json(nullptr);
            r.answer(body);
        } else if (inc->parsed()) {
            auto net = detail::load_net(file);
            require_valid(net);
            const auto a = r.outcome(first, net), b = r.outcome(second, net);
            if (a == b) throw InvalidInput("incomparable: outcomes are equal");
            auto ab = dominates(net, a, b, r.search());
            auto ba = dominates(net, b, a, r.search());
            visited += ab.visited + ba.visited;
            r.answer({{"answer", !ab.holds && !ba.holds}});
        } else if (part->parsed()) {
            auto mcp = detail::load_profile(file);
            require_valid(mcp);
            SearchStats stats;
            auto p = agent_partition(mcp, r.outcome(first, mcp.agent(0)), r.outcome(second, mcp.agent(0)),
                                     r.search(), &stats);
            visited += stats.visited;
            r.answer({{"answer", {{"prefers", p.prefers}, {"opposes", p.opposes}, {"incomparables", p.incomparables}}}});
        } else if (app.got_subcommand("pareto") || app.got_subcommand("majority")) {
            const bool is_pareto = app.got_subcommand("pareto");
            const auto& c = is_pareto ? pareto : majority;
            auto mcp = detail::load_profile(file);
            require_valid(mcp);
            const CPNet& first_net = mcp.agent(0);
            SearchStats stats;
            json body;
            if (c.dominates->parsed()) {
                const auto beta = r.outcome(first, first_net), alpha = r.outcome(second, first_net);
                body["answer"] = is_pareto ? pareto_dominates(mcp, beta, alpha, r.search(), &stats)
                                           : majority_dominates(mcp, beta, alpha, r.search(), &stats);
            } else if (c.is_optimal->parsed()) {
                const auto alpha = r.outcome(first, first_net);
                body["answer"] = is_pareto ? is_pareto_optimal(mcp, alpha, r.voting(), &stats)
                                           : is_majority_optimal(mcp, alpha, r.voting(), &stats);
            } else if (c.is_optimum->parsed()) {
                const auto alpha = r.outcome(first, first_net);
                body["answer"] = is_pareto ? is_pareto_optimum(mcp, alpha)
                                           : is_majority_optimum(mcp, alpha, r.voting(), &stats);
            } else if (c.exists_optimal->parsed()) {
                body = detail::existence_json(is_pareto ? exists_pareto_optimal(mcp)
                                                        : exists_majority_optimal(mcp, r.voting(), &stats));
            } else {
                body = detail::existence_json(is_pareto ? exists_pareto_optimum(mcp)
                                                        : exists_majority_optimum(mcp, r.voting(), &stats));
            }
            visited += stats.visited;
            r.answer(body);
        } else if (gadget->parsed()) {
            json net;
            json outcomes = json::object();
            if (g_formula->parsed()) {
                auto f = formula_net(detail::load_cnf(cnf));
                net = io::to_json(f.net);
                outcomes = {{"alpha", f.alpha().to_string()}, {"beta_bar", f.beta_bar().to_string()}};
            } else if (g_summ->parsed()) {
                auto s = summarized_formula_net(detail::load_cnf(cnf));
                net = io::to_json(s.net);
                outcomes = {{"alpha", s.alpha().to_string()}, {"beta_bar", s.beta_bar().to_string()}};
            } else if (g_hc->parsed() || g_hd->parsed()) {
                auto h = g_hc->parsed() ? h_c(m) : h_d(m);
                net = io::to_json(h.net);
                outcomes = {{"apex", h.net.name(h.wiring.apex)}};
            } else if (g_direct->parsed()) {
                auto alpha = Outcome::parse(bits);
                net = io::to_json(direct_net(alpha));
                outcomes = {{"optimum", alpha.to_string()}};
            } else if (g_ipo->parsed()) {
                auto p = m_ipo(detail::load_cnf(cnf));
                net = io::to_json(p.profile);
                outcomes = {{"alpha", p.alpha().to_string()}};
            } else if (g_eml->parsed() || g_imm->parsed()) {
                auto p = g_eml->parsed() ? m_eml(detail::load_qbf(qbf)) : m_imm(detail::load_qbf(qbf));
                net = io::to_json(p.profile);
                outcomes = {{"alpha_bar", p.alpha_bar().to_string()}, {"beta_empty", p.beta_sigma({}).to_string()}};
            } else if (g_nowin->parsed()) {
                net = io::to_json(m_nowin());
            }
            if (with_outcomes) {
                out << json{{"net", net}, {"outcomes", outcomes}}.dump(2) << "\n";
            } else {
                out << net.dump(2) << "\n";
            }
        } else if (orc->parsed()) {
            if (o_graph->parsed() || o_closure->parsed() || o_check->parsed()) {
                auto net = detail::load_net(file);
                require_valid(net);
                if (o_graph->parsed()) {
                    auto g = oracle::build_graph(net, opt.oracle_bound);
                    if (dot) {
                        r.raw(oracle::to_dot(g));
                    } else {
                        json edges = json::array();
                        for (const auto& [a, b] : g.edge_list()) edges.push_back({a.to_string(), b.to_string()});
                        visited += g.vertex_count();
                        r.answer({{"answer", {{"vertices", g.vertex_count()}, {"edges", edges}}}});
                    }
                } else if (o_closure->parsed()) {
                    auto c = oracle::closure(net, opt.oracle_bound);
                    json pairs = json::array();
                    const std::uint64_t count = std::uint64_t{1} << net.feature_count();
                    for (std::uint64_t ra = 0; ra < count; ++ra) {
                        const auto alpha = Outcome::from_rank(ra, net.feature_count());
                        for (std::uint64_t rb = 0; rb < count; ++rb) {
                            const auto beta = Outcome::from_rank(rb, net.feature_count());
                            if (c.dominates(beta, alpha)) pairs.push_back({beta.to_string(), alpha.to_string()});
                        }
                    }
                    visited += c.vertex_count();
                    r.answer({{"answer", {{"count", c.pair_count()}, {"dominance", pairs}}}});
                } else {
                    std::size_t pairs = 0;
                    auto d = oracle::check_engine(net, opt.oracle_bound, &pairs);
                    json body{{"answer", !d.has_value()}, {"pairs", pairs}};
                    if (d) {
                        body["counterexample"] = {{"alpha", d->alpha.to_string()},
                                                  {"beta", d->beta.to_string()},
                                                  {"engine", d->engine},
                                                  {"oracle", d->oracle}};
                    }
                    r.answer(body);
                }
            } else if (o_verify->parsed()) {
                oracle::LemmaInstance instance;
                if (!cnf.empty()) {
                    instance = detail::load_cnf(cnf);
                } else if (!file.empty()) {
                    instance = detail::load_profile(file);
                } else if (lemma == "theorem_nowin") {
                    instance = m_nowin();
                } else {
                    throw InvalidInput("oracle verify: give --cnf FILE or an mCP-net file");
                }
                auto rep = oracle::verify_lemma(lemma, instance, r.oracle_limits());
                json body{{"answer", rep.pass}, {"lemma", rep.tag}, {"checked", rep.checked}, {"method", rep.method}};
                if (!rep.pass) {
                    body["counterexample"] = {{"message", rep.message},
                                              {"beta", rep.beta ? json(rep.beta->to_string()) : json(nullptr)},
                                              {"alpha", rep.alpha ? json(rep.alpha->to_string()) : json(nullptr)}};
                }
                r.answer(body);
            } else if (o_sat->parsed()) {
                r.answer({{"answer", oracle::sat_enumerate(detail::load_cnf(cnf))}});
            } else if (o_qbf->parsed()) {
                r.answer({{"answer", oracle::qbf2_enumerate(detail::load_qbf(qbf))}});
            }
        }
    } catch (const InvalidInput& e) {
        err << "cpnet: invalid input: " << e.what() << "\n";
        return exit_invalid;
    } catch (const ResourceLimit& e) {
        err << "cpnet: " << e.what() << "\n";
        return exit_too_large;
    }
    return exit_ok;
}

}  // namespace cpnet::cli
