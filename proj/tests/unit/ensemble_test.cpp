#include <gtest/gtest.h>

#include <filesystem>

#include <nlohmann/json.hpp>

#include "sentinel/error.hpp"
#include "sentinel/models/ensemble.hpp"
#include "sentinel/scoring.hpp"
#include "test_fixtures.hpp"

namespace sentinel {
namespace {

using testing::golden_bundle;

EnsembleParams quick_params() {
    EnsembleParams p;
    p.forest.n_trees = 8;
    p.gbm.n_rounds = 10;
    p.mlp.epochs = 5;
    p.autoencoder.epochs = 5;
    p.svm.epochs = 3;
    return p;
}

const LabeledDataset& small_train() {
    static const auto ds = generate_synthetic(400, 0.15, 1.0, 11);
    return ds;
}

TEST(WeightsTest, Validation) {
    EXPECT_NO_THROW(AggregationWeights{}.validate());
    EXPECT_NO_THROW(AggregationWeights::uniform().validate());
    EXPECT_THROW((AggregationWeights{0.5, 0.5, 0.5, 0.0, 0.0}.validate()), Error);
    EXPECT_THROW((AggregationWeights{-0.1, 0.3, 0.3, 0.3, 0.2}.validate()), Error);
}

TEST(EnsembleTest, OutputsInRangeAndFlagDefinition) {
    const auto e = train_ensemble(small_train(), quick_params());
    for (const auto& r : small_train().rows) {
        const auto o = ensemble_predict(e, r.x);
        for (double p : o.probabilities()) {
            EXPECT_GE(p, 0.0);
            EXPECT_LE(p, 1.0);
        }
        EXPECT_GE(o.anomaly_score, 0.0);
        EXPECT_EQ(o.anomaly_flag, o.anomaly_score > e.autoencoder.anomaly_threshold);
    }
    EXPECT_THROW(ensemble_predict(e, std::vector<double>(3, 0.0)), Error);
}

TEST(EnsembleTest, BatchSerialEqualsParallel) {
    const auto e = train_ensemble(small_train(), quick_params());
    std::vector<FeatureVector> rows;
    for (const auto& r : small_train().rows) rows.push_back(r.x);
    EXPECT_EQ(predict_batch(e, rows, kernels::Exec::kSerial), predict_batch(e, rows, kernels::Exec::kParallel));
}

TEST(EnsembleTest, TrainingIsExecutionIndependent) {
    const auto a = train_ensemble(small_train(), quick_params(), kernels::Exec::kSerial);
    const auto b = train_ensemble(small_train(), quick_params(), kernels::Exec::kParallel);
    EXPECT_EQ(serialize_bundle(a), serialize_bundle(b));
}

TEST(EnsembleTest, ResampleArmsTrain) {
    for (auto r : {Resample::kUndersample, Resample::kSmote}) {
        auto p = quick_params();
        p.resample = r;
        const auto e = train_ensemble(small_train(), p);
        EXPECT_EQ(e.manifest, default_manifest());
    }
    EXPECT_EQ(parse_resample("smote"), Resample::kSmote);
    EXPECT_THROW(parse_resample("oversample"), Error);
}

TEST(BundleTest, RoundTripIsByteIdentical) {
    const auto e = train_ensemble(small_train(), quick_params());
    const auto text = serialize_bundle(e);
    const auto back = bundle_from_json(nlohmann::json::parse(text));
    EXPECT_EQ(serialize_bundle(back), text);
    for (std::size_t i = 0; i < 20; ++i) {
        EXPECT_EQ(ensemble_predict(back, small_train().rows[i].x), ensemble_predict(e, small_train().rows[i].x));
    }
}

TEST(BundleTest, SchemaViolationsRejected) {
    const auto doc = bundle_to_json(train_ensemble(small_train(), quick_params()));
    auto expect_schema = [](nlohmann::json j) {
        try {
            bundle_from_json(j);
            ADD_FAILURE() << "accepted";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::kSchemaError) << e.what();
        }
    };
    auto j = doc;
    j["format_version"] = 99;
    expect_schema(j);
    j = doc;
    j.erase("gbm");
    expect_schema(j);
    j = doc;
    j["manifest"][0] = "renamed";
    expect_schema(j);
    j = doc;
    j["extra"] = 1;
    expect_schema(j);
    j = doc;
    j["weights"]["tree"] = 0.9;
    EXPECT_THROW(bundle_from_json(j), Error);
}

TEST(BundleTest, LoadMissingFileIsIoError) {
    try {
        load_bundle("/nonexistent/bundle.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kIoError);
    }
}

TEST(GoldenTest, BundleIsReproducible) {
    const auto ds = generate_synthetic(2000, 0.1, kDefaultSeparation, 42);
    const auto [train, test] = stratified_split(ds, 0.25, 42);
    const auto e = train_ensemble(train, EnsembleParams{});
    EXPECT_EQ(serialize_bundle(e), testing::read_file(testing::fixture("golden/bundle_seed42.json")));
}

TEST(GoldenTest, KnownBadVector) {
    const auto golden = nlohmann::json::parse(testing::read_file(testing::fixture("golden/known_bad.json")));
    const auto x = testing::known_bad_features();
    EXPECT_EQ(x, golden["features"].get<std::vector<double>>());
    const auto o = ensemble_predict(golden_bundle(), x);
    int above = 0;
    for (double p : o.probabilities()) above += p > 0.5 ? 1 : 0;
    EXPECT_GE(above, 3);
    const auto explanation = explain(golden_bundle(), x);
    EXPECT_EQ(explanation.front().feature, golden["top_feature"].get<std::string>());
}

TEST(GoldenTest, FarOutsideInputIsAnomalous) {
    const auto& e = golden_bundle();
    EXPECT_GT(e.autoencoder.anomaly_score(std::vector<double>(kFeatureCount, 1.0)), e.autoencoder.anomaly_threshold);
}

}  // namespace
}  // namespace sentinel
