#include <gtest/gtest.h>

#include <cmath>

#include "sentinel/dataset.hpp"
#include "sentinel/models/gbm.hpp"
#include "sentinel/models/svm.hpp"

namespace sentinel {
namespace {

TEST(GbmTest, ZeroRoundsIsBaseRate) {
    const auto ds = generate_synthetic(200, 0.1, 1.0, 3);
    GbmParams p;
    p.n_rounds = 0;
    const auto g = train_gbm(ds, p);
    EXPECT_TRUE(g.stages.empty());
    for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(g.predict(ds.rows[i].x), 0.1, 1e-12);
    EXPECT_NEAR(sigmoid(g.base_log_odds), 0.1, 1e-12);
}

TEST(GbmTest, ZeroLearningRateMatchesZeroRounds) {
    const auto ds = generate_synthetic(200, 0.3, 1.0, 4);
    GbmParams none;
    none.n_rounds = 0;
    GbmParams frozen;
    frozen.learning_rate = 0.0;
    const auto a = train_gbm(ds, none);
    const auto b = train_gbm(ds, frozen);
    for (const auto& r : ds.rows) EXPECT_EQ(a.predict(r.x), b.predict(r.x));
}

TEST(GbmTest, LossNonIncreasing) {
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto ds = Normalizer::fit(generate_synthetic(500, 0.15, 1.0, seed)).apply(generate_synthetic(500, 0.15, 1.0, seed));
        std::vector<double> trace;
        GbmParams p;
        p.n_rounds = 60;
        p.learning_rate = 0.3;
        train_gbm(ds, p, &trace);
        ASSERT_EQ(trace.size(), 61u);
        for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] + 1e-9) << "round " << i;
        EXPECT_LT(trace.back(), trace.front());
    }
}

TEST(GbmTest, SingleClassClampsBaseRate) {
    LabeledDataset ds;
    ds.feature_names = {"a"};
    ds.rows = {{{0}, 0}, {{1}, 0}, {{2}, 0}};
    const auto g = train_gbm(ds, GbmParams{});
    EXPECT_TRUE(g.degenerate_base_rate);
    EXPECT_TRUE(std::isfinite(g.base_log_odds));
    EXPECT_NEAR(sigmoid(g.base_log_odds), kBaseRateClamp, 1e-15);
}

TEST(GbmTest, LogLoss) {
    const std::vector<double> p{0.5, 0.5};
    const std::vector<int> y{0, 1};
    EXPECT_NEAR(log_loss(p, y), std::log(2.0), 1e-15);
    EXPECT_NEAR(sigmoid(0.0), 0.5, 0.0);
    EXPECT_TRUE(std::isfinite(sigmoid(-1000.0)));
}

TEST(SvmTest, ZeroModel) {
    const auto s = zero_svm(3, 0.01);
    EXPECT_EQ(s.decision(std::vector<double>{1, 2, 3}), 0.0);
    EXPECT_EQ(s.predict(std::vector<double>{-4, 0, 9}), 0.5);
}

TEST(SvmTest, MarginRegionOnlyRegularizes) {
    LinearSvm s;
    s.weights = {2.0, -1.0};
    s.bias = 0.5;
    s.lambda = 0.1;
    const std::vector<double> x{1.0, 0.0};  // y f(x) = 2.5 > 1
    const auto g = svm_subgradient(s, x, +1);
    EXPECT_DOUBLE_EQ(g.weights[0], 0.2);
    EXPECT_DOUBLE_EQ(g.weights[1], -0.1);
    EXPECT_DOUBLE_EQ(g.bias, 0.05);

    const auto h = svm_subgradient(s, x, -1);  // inside the hinge
    EXPECT_DOUBLE_EQ(h.weights[0], 0.2 + 1.0);
    EXPECT_DOUBLE_EQ(h.bias, 0.05 + 1.0);
}

TEST(SvmTest, SeparableLine) {
    LabeledDataset ds;
    ds.feature_names = {"x"};
    for (int i = 0; i < 10; ++i) {
        ds.rows.push_back({{-1.0}, 0});
        ds.rows.push_back({{1.0}, 1});
    }
    SvmParams p;
    p.epochs = 100;
    p.lambda = 0.01;
    const auto s = train_svm(ds, p);
    int ok = 0;
    for (const auto& r : ds.rows) ok += (s.decision(r.x) > 0) == (r.label == 1);
    EXPECT_EQ(ok, 20);
    EXPECT_EQ(train_svm(ds, p).weights, s.weights);
}

}  // namespace
}  // namespace sentinel
