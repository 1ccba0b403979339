#include <gtest/gtest.h>

#include "cpnet/gadgets.hpp"
#include "cpnet/model.hpp"
#include "support/fixtures.hpp"

using namespace cpnet;
using cpnet::testing::dinner_net;

TEST(Outcome, ParseAndPrintRoundTrip) {
    auto o = Outcome::parse("0110");
    EXPECT_EQ(o.size(), 4u);
    EXPECT_FALSE(o.test(0));
    EXPECT_TRUE(o.test(1));
    EXPECT_EQ(o.to_string(), "0110");
    EXPECT_THROW(Outcome::parse("01x"), InvalidInput);
}

TEST(Outcome, PackedBitIsFeatureIndex) {
    auto o = Outcome::parse("100");
    EXPECT_EQ(o.packed(), 1u);
    EXPECT_EQ(Outcome::from_packed(4, 3).to_string(), "001");
}

TEST(Outcome, RankFollowsCanonicalOrder) {
    EXPECT_EQ(Outcome::from_rank(0, 3).to_string(), "000");
    EXPECT_EQ(Outcome::from_rank(1, 3).to_string(), "001");
    EXPECT_EQ(Outcome::from_rank(4, 3).to_string(), "100");
    for (std::uint64_t r = 0; r < 8; ++r) EXPECT_EQ(Outcome::from_rank(r, 3).rank(), r);
}

TEST(Outcome, WideOutcomes) {
    Outcome o(130);
    o.set(129, Value::One);
    EXPECT_TRUE(o.test(129));
    EXPECT_EQ(o.count_ones(), 1u);
    EXPECT_THROW(o.packed(), InstanceTooLarge);
    EXPECT_EQ(o.flipped(129).count_ones(), 0u);
}

TEST(ValidateNet, DinnerIsValid) { EXPECT_TRUE(validate_net(dinner_net()).ok()); }

TEST(ValidateNet, SelfLoopIsACycle) {
    CPNet net({"F"}, {CPTable{{0}, {Value::Zero, Value::One}}});
    auto r = validate_net(net);
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(to_string(r.violations.front().kind), "cycle");
}

TEST(ValidateNet, TwoCycle) {
    CPNet net({"A", "B"}, {CPTable{{1}, {Value::Zero, Value::One}}, CPTable{{0}, {Value::Zero, Value::One}}});
    EXPECT_TRUE(validate_net(net).has(Violation::Kind::Cycle));
    EXPECT_THROW(require_valid(net), CycleDetected);
}

TEST(ValidateNet, IncompleteTable) {
    CPNet net({"Main", "Wine"}, {CPTable{{}, {Value::Zero}}, CPTable{{0}, {Value::Zero}}});
    auto r = validate_net(net);
    ASSERT_TRUE(r.has(Violation::Kind::IncompleteTable));
    EXPECT_NE(r.summary().find("needs 2"), std::string::npos);
}

TEST(ValidateNet, NameAndParentProblems) {
    CPNet dup({"A", "A"}, {CPTable{{}, {Value::Zero}}, CPTable{{}, {Value::Zero}}});
    EXPECT_TRUE(validate_net(dup).has(Violation::Kind::DuplicateName));
    CPNet range({"A"}, {CPTable{{3}, {Value::Zero, Value::One}}});
    EXPECT_TRUE(validate_net(range).has(Violation::Kind::ParentOutOfRange));
    CPNet twice({"A", "B"}, {CPTable{{}, {Value::Zero}},
                             CPTable{{0, 0}, {Value::Zero, Value::One, Value::One, Value::One}}});
    EXPECT_TRUE(validate_net(twice).has(Violation::Kind::DuplicateParent));
}

TEST(ValidateProfile, FeatureMismatchAndEmpty) {
    EXPECT_TRUE(validate_profile(MCPNet{}).has(Violation::Kind::NoAgents));
    CPNet other({"Main", "Beer"}, {CPTable{{}, {Value::Zero}}, CPTable{{}, {Value::Zero}}});
    EXPECT_TRUE(validate_profile(MCPNet({dinner_net(), other})).has(Violation::Kind::FeatureMismatch));
    EXPECT_TRUE(validate_profile(MCPNet({dinner_net(), dinner_net()})).ok());
}

TEST(TopologicalOrder, Dinner) {
    EXPECT_EQ(topological_order(dinner_net()), (std::vector<std::size_t>{0, 1}));
}

TEST(TopologicalOrder, EdgelessUsesIndexOrder) {
    EXPECT_EQ(topological_order(direct_net(Outcome::parse("000"))), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(TopologicalOrder, LowestReadyIndexFirst) {
    // A depends on C. B and C start ready, and B has the lower index.
    CPNet net({"A", "B", "C"},
              {CPTable{{2}, {Value::Zero, Value::One}}, CPTable{{}, {Value::Zero}}, CPTable{{}, {Value::One}}});
    EXPECT_EQ(topological_order(net), (std::vector<std::size_t>{1, 2, 0}));
}

TEST(TopologicalOrder, FormulaNetLayers) {
    CnfFormula phi{4, {{pos(0), pos(1), neg(2)}, {neg(1), pos(2), neg(3)}}};
    auto f = formula_net(phi);
    auto order = topological_order(f.net);
    std::vector<std::size_t> at(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) at[order[i]] = i;
    for (auto v : f.layout.variable_features()) {
        for (auto l : f.layout.literal_features()) EXPECT_LT(at[v], at[l]);
    }
    for (auto l : f.layout.literal_features()) {
        for (auto c : f.layout.clauses) EXPECT_LT(at[l], at[c]);
    }
}

TEST(Indegree, Examples) {
    EXPECT_EQ(indegree(dinner_net()), 1u);
    EXPECT_EQ(indegree(direct_net(Outcome::parse("0101"))), 0u);
    CnfFormula phi{3, {{pos(0), pos(1), neg(2)}}};
    EXPECT_EQ(indegree(formula_net(phi).net), 3u);
}

TEST(NetBuilder, MissingTableThrows) {
    NetBuilder b;
    b.add("A");
    EXPECT_THROW(b.build(), InvalidInput);
}

TEST(NetBuilder, ConditionalRowsUseParentBits) {
    NetBuilder b;
    auto a = b.add("A");
    auto c = b.add("B");
    auto d = b.add("C");
    b.unconditional(a, Value::Zero).unconditional(c, Value::Zero);
    b.conditional(d, {a, c}, rules::pattern({Value::One, Value::Zero}, Value::One, Value::Zero));
    auto net = b.build();
    // Row index = A + 2B, so A=1, B=0 is row 1.
    EXPECT_EQ(net.table(d).preferred, (std::vector<Value>{Value::Zero, Value::One, Value::Zero, Value::Zero}));
}
