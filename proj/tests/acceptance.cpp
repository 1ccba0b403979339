// Acceptance run: one [PASS]/[FAIL] line per criterion, with wall time.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cpnet/gadgets.hpp"
#include "cpnet/io.hpp"
#include "cpnet/oracle.hpp"
#include "cpnet/semantics.hpp"
#include "cpnet/voting.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace cpnet;
using namespace cpnet::testing;

namespace {

// Records the first failed requirement of a criterion; later ones are
// counted but not described.
class Check {
public:
    void require(bool cond, const std::string& msg) {
        ++checked_;
        if (cond) return;
        if (failures_++ == 0) first_ = msg;
    }
    bool ok() const { return failures_ == 0; }
    std::size_t checked() const { return checked_; }
    std::string summary() const {
        std::ostringstream s;
        if (ok()) {
            s << checked_ << " checks";
        } else {
            s << failures_ << "/" << checked_ << " checks failed, first: " << first_;
        }
        return s.str();
    }

private:
    std::size_t checked_ = 0;
    std::size_t failures_ = 0;
    std::string first_;
};

struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::function<void(Check&)> body;
};

std::string bits(const Outcome& o) { return o.to_string(); }

std::string show(const CnfFormula& phi) { return io::to_dimacs(phi); }

// -- 1 ----------------------------------------------------------------------

void dinner_fixture(Check& c) {
    auto net = io::read_net(data_file("dinner.json"));
    c.require(validate_net(net).ok(), "dinner net invalid");
    c.require(forward_sweep_optimum(net) == mr, "optimum is " + bits(forward_sweep_optimum(net)));

    auto g = oracle::build_graph(net);
    std::set<std::pair<std::string, std::string>> edges;
    for (const auto& [a, b] : g.edge_list()) edges.insert({bits(a), bits(b)});
    const std::set<std::pair<std::string, std::string>> want{
        {bits(fr), bits(fw)}, {bits(fr), bits(mr)}, {bits(fw), bits(mw)}, {bits(mw), bits(mr)}};
    c.require(edges == want, "edge set differs");

    auto closure = oracle::closure(g);
    const std::vector<Outcome> order{mr, mw, fw, fr};
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = 0; j < order.size(); ++j) {
            c.require(closure.dominates(order[i], order[j]) == (i < j),
                      "closure on " + bits(order[i]) + " over " + bits(order[j]));
            if (i != j) {
                c.require(dominates(net, order[i], order[j]).holds == (i < j),
                          "engine on " + bits(order[i]) + " over " + bits(order[j]));
            }
        }
    }
}

// -- 2 ----------------------------------------------------------------------

void formula_net_equivalence(Check& c) {
    for (const auto& phi : formula_family(3, 2)) {
        auto f = formula_net(phi);
        const bool sat = oracle::sat_enumerate(phi);
        c.require(dominates(f.net, f.beta_bar(), f.alpha()).holds == sat, "dominance on " + show(phi));
        c.require(incomparable(f.net, f.alpha(), f.beta_bar()) == !sat, "incomparability on " + show(phi));
    }
}

// -- 3 ----------------------------------------------------------------------

void partial_assignments(Check& c) {
    for (const auto& phi : formula_family(3, 2)) {
        auto f = formula_net(phi);
        const auto beta = f.beta_bar();
        for (const auto& sigma : oracle::detail::partial_assignments(phi.num_vars)) {
            const auto alpha = encode_assignment(sigma, f.layout, f.net.feature_count());
            const bool ext = oracle::sat_enumerate(phi, sigma);
            c.require(dominates(f.net, beta, alpha).holds == ext,
                      "sigma " + oracle::detail::describe(sigma) + " on " + show(phi));
        }
    }
}

// -- 4 ----------------------------------------------------------------------

void summarized_net(Check& c) {
    for (const auto& phi : formula_family(2, 1)) {
        auto s = summarized_formula_net(phi);
        const bool sat = oracle::sat_enumerate(phi);
        const bool forward = dominates(s.net, s.beta_bar(), s.alpha()).holds;
        const bool backward = dominates(s.net, s.alpha(), s.beta_bar()).holds;
        c.require(forward == sat, "dominance on " + show(phi));
        c.require((!forward && !backward) == !sat, "incomparability on " + show(phi));
    }
}

// -- 5 ----------------------------------------------------------------------

void ipo_profiles(Check& c) {
    VotingLimits limits;
    limits.max_states = std::size_t{1} << 22;
    for (const auto& phi : formula_family(2, 2)) {
        auto p = m_ipo(phi);
        const bool sat = oracle::sat_enumerate(phi);
        c.require(is_pareto_optimal(p.profile, p.alpha(), limits) == !sat, "M_ipo on " + show(phi));
    }
}

// -- 6 ----------------------------------------------------------------------

void no_winner(Check& c) {
    auto m = io::read_profile(data_file("m_nowin.json"));
    c.require(io::to_json(m) == io::to_json(m_nowin()), "fixture differs from generator");
    c.require(!exists_majority_optimal(m).exists, "a majority optimal outcome exists");
    c.require(!exists_majority_optimum(m).exists, "a majority optimum outcome exists");
    // Best first; a = 0, overlined = 1, features A then B.
    const std::vector<std::vector<std::string>> orders{
        {"11", "10", "00", "01"},
        {"10", "00", "01", "11"},
        {"00", "01", "11", "10"},
        {"01", "11", "10", "00"},
    };
    for (std::size_t k = 0; k < 4; ++k) {
        auto closure = oracle::closure(m.agent(k));
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                const auto a = Outcome::parse(orders[k][i]);
                const auto b = Outcome::parse(orders[k][j]);
                c.require(closure.dominates(a, b) == (i < j),
                          "agent " + std::to_string(k + 1) + " on " + orders[k][i] + " over " + orders[k][j]);
            }
        }
    }
    for (std::uint64_t r = 0; r < 4; ++r) {
        const auto o = Outcome::from_rank(r, 2);
        c.require(!is_majority_optimal(m, o), bits(o) + " is majority optimal");
    }
}

// -- 7 and 8 ----------------------------------------------------------------

std::vector<MCPNet> random_profiles(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    ProfileShape shape;
    shape.max_features = 8;
    shape.max_agents = 4;
    std::vector<MCPNet> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(random_profile(rng, shape));
    return out;
}

const std::vector<MCPNet>& shared_profiles() {
    static const auto profiles = random_profiles(20240607, 500);
    return profiles;
}

std::vector<oracle::DominanceClosure> closures(const MCPNet& m) {
    std::vector<oracle::DominanceClosure> out;
    for (const auto& a : m.agents()) out.push_back(oracle::closure(a));
    return out;
}

bool pareto_by_closure(const std::vector<oracle::DominanceClosure>& c, const Outcome& beta, const Outcome& alpha) {
    return std::all_of(c.begin(), c.end(), [&](const auto& k) { return k.dominates(beta, alpha); });
}

void same_optimum(Check& c) {
    for (std::size_t i = 0; i < shared_profiles().size(); ++i) {
        const auto& m = shared_profiles()[i];
        const std::string tag = "profile " + std::to_string(i);
        const std::size_t n = m.feature_count();
        const auto first = forward_sweep_optimum(m.agent(0));
        bool all_equal = true;
        for (const auto& a : m.agents()) all_equal &= forward_sweep_optimum(a) == first;

        auto e = exists_pareto_optimum(m);
        c.require(e.exists == all_equal, tag + ": existence");

        const auto cl = closures(m);
        bool brute_exists = false;
        for (std::uint64_t ra = 0; ra < (std::uint64_t{1} << n); ++ra) {
            const auto alpha = Outcome::from_rank(ra, n);
            bool brute = true;
            for (std::uint64_t rb = 0; rb < (std::uint64_t{1} << n) && brute; ++rb) {
                if (ra != rb) brute = pareto_by_closure(cl, alpha, Outcome::from_rank(rb, n));
            }
            brute_exists |= brute;
            const bool engine = is_pareto_optimum(m, alpha);
            c.require(engine == (all_equal && alpha == first), tag + ": optimum test at " + bits(alpha));
            c.require(engine == brute, tag + ": brute force at " + bits(alpha));
        }
        c.require(brute_exists == all_equal, tag + ": brute-force existence");
        if (e.exists) c.require(*e.witness == first, tag + ": witness");
    }
}

void pareto_optimal_exists(Check& c) {
    for (std::size_t i = 0; i < shared_profiles().size(); ++i) {
        const auto& m = shared_profiles()[i];
        const std::string tag = "profile " + std::to_string(i);
        const std::size_t n = m.feature_count();
        auto e = exists_pareto_optimal(m);
        c.require(e.exists && e.witness, tag + ": no witness");
        if (!e.witness) continue;
        const auto cl = closures(m);
        bool dominated = false;
        for (std::uint64_t rb = 0; rb < (std::uint64_t{1} << n); ++rb) {
            const auto beta = Outcome::from_rank(rb, n);
            if (beta != *e.witness) dominated |= pareto_by_closure(cl, beta, *e.witness);
        }
        c.require(!dominated, tag + ": witness " + bits(*e.witness) + " is Pareto dominated");
        c.require(is_pareto_optimal(m, *e.witness), tag + ": engine disagrees on witness");
    }
}

// -- 9 ----------------------------------------------------------------------

void engine_agreement(Check& c) {
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<std::size_t> nd(2, 10);
    std::uniform_real_distribution<double> density(0.2, 0.8);
    std::size_t pairs = 0;
    for (int i = 0; i < 200; ++i) {
        auto net = random_net(rng, {nd(rng), 3, density(rng)});
        auto d = oracle::check_engine(net, 14, &pairs);
        c.require(!d, "net " + std::to_string(i) + " disagrees" +
                          (d ? " on " + bits(d->beta) + " over " + bits(d->alpha) : std::string()));
    }
    std::cout << "       " << pairs << " ordered pairs compared\n";
}

// -- 10 ---------------------------------------------------------------------

void specialization(Check& c) {
    std::mt19937_64 rng(4242);
    for (int i = 0; i < 200; ++i) {
        ProfileShape shape;
        shape.max_features = 6;
        shape.min_agents = shape.max_agents = i % 2 == 0 ? 1 : 2;
        auto m = random_profile(rng, shape);
        const std::size_t n = m.feature_count();
        const std::string tag = "profile " + std::to_string(i) + " (m=" + std::to_string(m.agent_count()) + ")";
        for (std::uint64_t ra = 0; ra < (std::uint64_t{1} << n); ++ra) {
            const auto alpha = Outcome::from_rank(ra, n);
            for (std::uint64_t rb = 0; rb < (std::uint64_t{1} << n); ++rb) {
                if (ra == rb) continue;
                const auto beta = Outcome::from_rank(rb, n);
                const bool maj = majority_dominates(m, beta, alpha);
                const bool par = pareto_dominates(m, beta, alpha);
                c.require(maj == par, tag + ": majority and Pareto differ");
                if (m.agent_count() == 1) {
                    c.require(maj == dominates(m.agent(0), beta, alpha).holds, tag + ": voting differs from dominance");
                }
            }
            if (m.agent_count() == 1) {
                const bool single = is_optimal(m.agent(0), alpha);
                c.require(is_pareto_optimal(m, alpha) == single, tag + ": Pareto optimal at " + bits(alpha));
                c.require(is_majority_optimal(m, alpha) == single, tag + ": majority optimal at " + bits(alpha));
            }
        }
    }
}

// -- 11 ---------------------------------------------------------------------

void gadget_structure(Check& c) {
    std::mt19937_64 rng(1111);
    auto well_formed = [&](const CPNet& net, const std::string& what) {
        auto r = validate_net(net);
        c.require(r.ok(), what + ": " + r.summary());
        c.require(indegree(net) <= 3, what + ": indegree " + std::to_string(indegree(net)));
    };
    for (int i = 0; i < 50; ++i) {
        auto phi = random_formula(rng, 5, 4);
        const std::string tag = "formula " + std::to_string(i);
        well_formed(formula_net(phi).net, tag + " F");
        well_formed(summarized_formula_net(phi).net, tag + " F_s");
        const auto ipo = m_ipo(phi);
        for (const auto& a : ipo.profile.agents()) well_formed(a, tag + " M_ipo");
        std::vector<std::size_t> vars(phi.num_vars);
        std::iota(vars.begin(), vars.end(), 0);
        std::shuffle(vars.begin(), vars.end(), rng);
        const auto split = static_cast<std::ptrdiff_t>(std::uniform_int_distribution<std::size_t>(0, vars.size())(rng));
        Qbf2Formula Phi{{vars.begin(), vars.begin() + split}, {vars.begin() + split, vars.end()}, phi};
        const auto imm = m_imm(Phi);
        for (const auto& a : imm.profile.agents()) well_formed(a, tag + " M_imm");
        const auto eml = m_eml(Phi);
        for (const auto& a : eml.profile.agents()) well_formed(a, tag + " M_eml");
    }
    for (std::size_t m = 1; m <= 32; ++m) {
        for (const auto& h : {h_c(m), h_d(m)}) {
            well_formed(h.net, "H(" + std::to_string(m) + ")");
            if (m >= 3) {
                c.require(h.wiring.features.size() < m, "H(" + std::to_string(m) + ") has " +
                                                            std::to_string(h.wiring.features.size()) + " fresh");
            }
        }
    }
}

// -- 12 ---------------------------------------------------------------------

// All Phi with X = {x1}, Y = {y1} and one clause.
std::vector<Qbf2Formula> smallest_qbfs() {
    std::vector<Qbf2Formula> out;
    for (const auto& clause : all_clauses(2)) out.push_back({{0}, {1}, CnfFormula{2, {clause}}});
    return out;
}

void qbf_spot_checks(Check& c) {
    std::mt19937_64 rng(12);
    const std::vector<PartialAssignment> sigmas{{}, {{0, true}}, {{0, false}}};
    for (const auto& Phi : smallest_qbfs()) {
        const std::string tag = show(Phi.matrix);
        const bool valid = oracle::qbf2_enumerate(Phi);
        auto imm = m_imm(Phi);
        auto eml = m_eml(Phi);
        const std::size_t n = imm.profile.feature_count();
        const auto alpha_bar = imm.alpha_bar();
        const auto u1 = imm.layout.summarized.u1;

        // N2 of M_imm is D(alpha_bar).
        for (int k = 0; k < 50; ++k) {
            auto beta = random_outcome(rng, n);
            if (beta == alpha_bar) continue;
            c.require(dominates(imm.profile.agent(1), alpha_bar, beta).holds, tag + ": N2 misses " + bits(beta));
        }

        for (const auto& sigma : sigmas) {
            const auto beta = imm.beta_sigma(sigma);
            const std::string at = tag + " sigma " + oracle::detail::describe(sigma);

            // N3 never raises U1 from an outcome of the class O_c.
            bool raised = false;
            for (const auto& o : reachable_outcomes(imm.profile.agent(2), beta)) raised |= o.test(u1);
            c.require(!raised, at + ": N3 reaches U1 = 1");

            // N1 (and N2 of M_eml, with U1 and U2 exchanged) follow the summarized-net lemma.
            const bool ext = oracle::sat_enumerate(Phi.matrix, sigma);
            for (std::size_t k : {0u, 1u}) {
                const auto& net = eml.profile.agent(k);
                const bool forward = dominates(net, alpha_bar, beta).holds;
                const bool backward = dominates(net, beta, alpha_bar).holds;
                c.require(forward == ext, at + ": N" + std::to_string(k + 1) + " dominance");
                c.require((!forward && !backward) == !ext, at + ": N" + std::to_string(k + 1) + " incomparability");
            }
            c.require(dominates(imm.profile.agent(0), alpha_bar, beta).holds == ext, at + ": M_imm N1 dominance");

            // beta_sigma is majority optimal in M_eml exactly when no extension satisfies phi.
            c.require(is_majority_optimal(eml.profile, beta) == !ext, at + ": M_eml majority optimality");
        }

        // M_imm: alpha_bar is a majority optimum exactly when Phi is not valid.
        c.require(is_majority_optimum(imm.profile, alpha_bar) == !valid, tag + ": M_imm optimum at alpha_bar");
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));
    const std::vector<Criterion> criteria{
        {1, "dinner fixture: optimum, 4 edges, total order", 1, dinner_fixture},
        {2, "formula net: dominance iff satisfiable, n<=3, <=2 clauses", 60, formula_net_equivalence},
        {3, "formula net: all partial assignments", 300, partial_assignments},
        {4, "summarized net: both directions, n<=2, 1 clause", 60, summarized_net},
        {5, "M_ipo: all-zeros Pareto optimal iff unsatisfiable, budget 2^22", 600, ipo_profiles},
        {6, "M_NoWin: no majority optimal or optimum, four total orders", 1, no_winner},
        {7, "Pareto optimum iff all agent optima agree, 500 profiles", 300, same_optimum},
        {8, "Pareto optimal witness undominated, 500 profiles", 300, pareto_optimal_exists},
        {9, "engine vs closure dominance, 200 nets, n in [2,10]", 600, engine_agreement},
        {10, "m=1: voting = dominance; m=2: majority = Pareto, 200 profiles", 300, specialization},
        {11, "gadget structure: validity, indegree <= 3, H_C/H_D sizes", 60, gadget_structure},
        {12, "M_imm / M_eml spot checks on the smallest QBFs", 600, qbf_spot_checks},
    };
    int failed = 0;
    for (const auto& cr : criteria) {
        if (!only.empty() && !only.count(cr.id)) continue;
        Check c;
        const auto t0 = std::chrono::steady_clock::now();
        std::string error;
        try {
            cr.body(c);
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = s <= cr.budget_s;
        const bool pass = error.empty() && c.ok() && in_time;
        failed += !pass;
        char timing[64];
        std::snprintf(timing, sizeof timing, "%.2f s / %.0f s", s, cr.budget_s);
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << cr.id << ". " << cr.title << " -- " << c.summary() << " ("
                  << timing << ")";
        if (!error.empty()) std::cout << " exception: " << error;
        if (!in_time) std::cout << " over time budget";
        std::cout << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed;
}
