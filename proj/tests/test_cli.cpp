#include <sstream>

#include <gtest/gtest.h>

#include "cpnet/cli.hpp"
#include "cpnet/io.hpp"
#include "support/fixtures.hpp"

using namespace cpnet;
using json = nlohmann::json;

namespace {

struct Result {
    int code;
    json body;
    std::string out;
    std::string err;
};

std::string data(const std::string& name) { return std::string(CPNET_DATA_DIR) + "/" + name; }

Result run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    json body;
    if (code == 0 && !out.str().empty() && out.str().front() == '{') body = json::parse(out.str());
    return {code, body, out.str(), err.str()};
}

}  // namespace

TEST(Cli, OptimumDinner) {
    auto r = run({"optimum", data("dinner.json")});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.body["answer"], "00");
    EXPECT_TRUE(r.body["stats"].contains("wall_ms"));
}

TEST(Cli, MajorityNoWin) {
    auto r = run({"majority", "exists-optimal", data("m_nowin.json")});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.body["answer"], false);
    EXPECT_TRUE(r.body["witness"].is_null());
}

TEST(Cli, DominanceWitnessReplays) {
    const std::string path = ::testing::TempDir() + "fphi.json";
    {
        auto g = run({"gadget", "formula-net", "--cnf", data("fig5.cnf"), "--outcomes"});
        ASSERT_EQ(g.code, 0);
        std::ofstream(path) << g.body["net"].dump();
        auto r = run({"dominates", path, g.body["outcomes"]["beta_bar"], g.body["outcomes"]["alpha"], "--witness"});
        ASSERT_EQ(r.code, 0);
        EXPECT_EQ(r.body["answer"], true);
        auto net = io::net_from_json(g.body["net"]);
        const auto& w = r.body["witness"];
        FlipSequence seq{Outcome::parse(w["start"].get<std::string>()), Outcome::parse(w["end"].get<std::string>()), {}};
        for (const auto& s : w["steps"]) {
            seq.steps.push_back({s["index"].get<std::size_t>(), to_value(s["from"] == 1), to_value(s["to"] == 1)});
        }
        EXPECT_TRUE(replay(net, seq));
    }
}

TEST(Cli, MatchesLibrary) {
    auto m = io::read_profile(cpnet::testing::data_file("dinner_agents.json"));
    auto r = run({"pareto", "is-optimal", data("dinner_agents.json"), "01"});
    EXPECT_EQ(r.body["answer"], is_pareto_optimal(m, Outcome::parse("01")));
    r = run({"majority", "is-optimum", data("dinner_agents.json"), "00"});
    EXPECT_EQ(r.body["answer"], is_majority_optimum(m, Outcome::parse("00")));
    r = run({"partition", data("m_nowin.json"), "10", "00"});
    EXPECT_EQ(r.body["answer"]["prefers"], json({0, 1, 3}));
    r = run({"--named", "incomparable", data("dinner.json"), "Main=m,Wine=w", "Main=f,Wine=r"});
    EXPECT_EQ(r.body["answer"], false);
}

TEST(Cli, Validate) {
    auto r = run({"validate", data("dinner.json")});
    EXPECT_EQ(r.body["answer"], true);
    r = run({"validate", data("m_nowin.json")});
    EXPECT_EQ(r.body["answer"], true);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({"optimum", data("missing.json")}).code, cli::exit_invalid);
    EXPECT_EQ(run({"dominates", data("dinner.json"), "0", "00"}).code, cli::exit_invalid);
    EXPECT_EQ(run({"nonsense"}).code, cli::exit_invalid);
    EXPECT_EQ(run({"--max-states", "1", "dominates", data("dinner.json"), "00", "11"}).code, cli::exit_too_large);
    EXPECT_EQ(run({"--oracle-bound", "1", "oracle", "graph", data("dinner.json")}).code, cli::exit_too_large);
    EXPECT_EQ(run({"--max-enum", "1", "majority", "exists-optimum", data("m_nowin.json")}).code, cli::exit_too_large);
    auto bad = run({"incomparable", data("dinner.json"), "00", "00"});
    EXPECT_EQ(bad.code, cli::exit_invalid);
    EXPECT_FALSE(bad.err.empty());
}

TEST(Cli, OracleCommands) {
    auto r = run({"oracle", "verify", "--lemma", "corollary1", "--cnf", data("fig5.cnf")});
    EXPECT_EQ(r.body["answer"], true);
    r = run({"oracle", "verify", "--lemma", "theorem_nowin"});
    EXPECT_EQ(r.body["answer"], true);
    r = run({"oracle", "sat", "--cnf", data("unsat.cnf")});
    EXPECT_EQ(r.body["answer"], false);
    r = run({"oracle", "check", data("dinner.json")});
    EXPECT_EQ(r.body["answer"], true);
    auto dot = run({"oracle", "graph", "--dot", data("dinner.json")});
    EXPECT_NE(dot.out.find("digraph"), std::string::npos);
}

TEST(Cli, Gadgets) {
    auto r = run({"gadget", "hc", "-m", "9"});
    ASSERT_EQ(r.code, 0);
    auto net = io::net_from_json(json::parse(r.out));
    EXPECT_EQ(net.feature_count(), 16u);
    r = run({"gadget", "direct", "--outcome", "010"});
    net = io::net_from_json(json::parse(r.out));
    EXPECT_EQ(forward_sweep_optimum(net).to_string(), "010");
    r = run({"gadget", "m-imm", "--qbf", data("small.qdimacs")});
    EXPECT_EQ(io::profile_from_json(json::parse(r.out)).agent_count(), 3u);
}
