#include <gtest/gtest.h>

#include "sentinel/error.hpp"
#include "sentinel/scoring.hpp"
#include "test_fixtures.hpp"

namespace sentinel {
namespace {

using testing::constant_ensemble;

TEST(AggregateTest, Examples) {
    ModelOutputs o{0.2, 0.4, 0.6, 0.8, 0.5, 0.0, false};
    EXPECT_NEAR(aggregate_score(o, AggregationWeights::uniform()), 50.0, 1e-12);
    EXPECT_EQ(aggregate_score(ModelOutputs{}, AggregationWeights{}), 0.0);
    ModelOutputs flagged;
    flagged.anomaly_flag = true;
    EXPECT_EQ(aggregate_score(flagged, AggregationWeights{}), 75.0);
    ModelOutputs high{1, 1, 1, 1, 1, 0.0, true};
    EXPECT_NEAR(aggregate_score(high, AggregationWeights{}), 100.0, 1e-12);
}

TEST(VerdictTest, Boundaries) {
    EXPECT_EQ(assign_verdict(10), Verdict::kSafe);
    EXPECT_EQ(assign_verdict(29.999), Verdict::kSafe);
    EXPECT_EQ(assign_verdict(30), Verdict::kCaution);
    EXPECT_EQ(assign_verdict(69.999), Verdict::kCaution);
    EXPECT_EQ(assign_verdict(70), Verdict::kDanger);
    EXPECT_EQ(assign_verdict(100), Verdict::kDanger);
    EXPECT_THROW((VerdictThresholds{70, 30}.validate()), Error);
    EXPECT_EQ(parse_verdict("danger"), Verdict::kDanger);
    EXPECT_EQ(verdict_name(Verdict::kCaution), "caution");
}

TEST(ExplainTest, ConstantModelsHaveZeroDeltas) {
    const auto e = constant_ensemble(0.3);
    FeatureVector x(kFeatureCount, 7.0);
    for (const auto& c : explain(e, x)) EXPECT_EQ(c.delta, 0.0) << c.feature;
}

TEST(ExplainTest, OnlySplitFeatureContributes) {
    auto e = constant_ensemble(0.3);
    DecisionTree t;
    t.feature_count = kFeatureCount;
    t.nodes = {TreeNode{3, 0.5, 1, 2, 0.0, 2}, TreeNode{-1, 0, -1, -1, 0.0, 1}, TreeNode{-1, 0, -1, -1, 1.0, 1}};
    e.tree = t;
    FeatureVector x(kFeatureCount, 0.0);
    x[3] = 90.0;  // normalizes to 0.9, right branch
    const auto ex = explain(e, x);
    EXPECT_EQ(ex.front().feature, default_manifest()[3]);
    EXPECT_NEAR(ex.front().delta, 100.0 * 0.15, 1e-12);
    for (std::size_t i = 1; i < ex.size(); ++i) EXPECT_EQ(ex[i].delta, 0.0);
}

TEST(RescoreTest, EmptySessionKeepsScore) {
    const auto e = constant_ensemble(0.1);
    const FeatureVector x(kFeatureCount, 1.0);
    const auto a = assess(e, x, ScoringConfig{}, 10);
    const auto b = rescore_with_session(a, x, SessionFeatures{}, e, ScoringConfig{}, 11);
    EXPECT_EQ(b.score, a.score);
    EXPECT_EQ(b.verdict, Verdict::kSafe);
}

TEST(RescoreTest, HiddenRedirectFloorsToDanger) {
    const auto e = constant_ensemble(0.1);
    const FeatureVector x(kFeatureCount, 1.0);
    const auto a = assess(e, x, ScoringConfig{}, 10);
    ASSERT_EQ(a.verdict, Verdict::kSafe);
    SessionFeatures s;
    s.hidden_redirect_flag = true;
    const auto b = rescore_with_session(a, x, s, e, ScoringConfig{}, 11);
    EXPECT_GE(b.score, 70.0);
    EXPECT_EQ(b.verdict, Verdict::kDanger);

    SessionFeatures submit;
    submit.external_form_submit = true;
    submit.external_sensitive_submit = true;
    EXPECT_EQ(rescore_with_session(a, x, submit, e, ScoringConfig{}, 11).verdict, Verdict::kDanger);
    SessionFeatures plain_submit;
    plain_submit.external_form_submit = true;
    EXPECT_EQ(rescore_with_session(a, x, plain_submit, e, ScoringConfig{}, 11).verdict, Verdict::kSafe);
}

TEST(RescoreTest, RatchetNeverLowers) {
    auto e = constant_ensemble(0.1);
    DecisionTree t;
    t.feature_count = kFeatureCount;
    // Redirect chains lower this tree's output.
    t.nodes = {TreeNode{static_cast<int>(feature::kRedirectChainLength), 0.5, 1, 2, 0.0, 2},
               TreeNode{-1, 0, -1, -1, 1.0, 1}, TreeNode{-1, 0, -1, -1, 0.0, 1}};
    e.tree = t;
    const FeatureVector x(kFeatureCount, 0.0);
    const auto a = assess(e, x, ScoringConfig{}, 1);
    SessionFeatures s;
    s.redirect_chain_length = 80;
    const auto b = rescore_with_session(a, x, s, e, ScoringConfig{}, 2);
    EXPECT_EQ(b.score, a.score);
}

}  // namespace
}  // namespace sentinel
