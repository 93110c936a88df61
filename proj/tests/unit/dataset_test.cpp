#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "sentinel/dataset.hpp"
#include "sentinel/rng.hpp"
#include "sentinel/error.hpp"
#include "sentinel/models/tree.hpp"

namespace sentinel {
namespace {

LabeledDataset make(std::size_t legit, std::size_t fraud, std::size_t dim = 2, std::uint64_t seed = 1) {
    LabeledDataset ds;
    for (std::size_t i = 0; i < dim; ++i) ds.feature_names.push_back("f" + std::to_string(i));
    Rng rng(seed);
    for (std::size_t i = 0; i < legit + fraud; ++i) {
        FeatureVector x(dim);
        for (auto& v : x) v = rng.uniform(-1.0, 1.0) + (i < legit ? 0.0 : 3.0);
        ds.rows.push_back({x, i < legit ? 0 : 1});
    }
    return ds;
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error";
    return ErrorCode::kIoError;
}

TEST(SyntheticTest, ExactFraudCount) {
    const auto ds = generate_synthetic(100, 0.1, 1.0, 7);
    EXPECT_EQ(ds.size(), 100u);
    EXPECT_EQ(ds.count_label(1), 10u);
    EXPECT_EQ(ds.feature_names, default_manifest());
}

TEST(SyntheticTest, Deterministic) {
    EXPECT_EQ(to_csv(generate_synthetic(300, 0.2, 1.0, 9)), to_csv(generate_synthetic(300, 0.2, 1.0, 9)));
    EXPECT_NE(to_csv(generate_synthetic(300, 0.2, 1.0, 9)), to_csv(generate_synthetic(300, 0.2, 1.0, 10)));
}

TEST(SyntheticTest, ZeroSeparationMakesClassesIdenticallyDistributed) {
    // With separation 0 both labels use the legit column, so mean url_length
    // of the two classes agrees to within sampling noise.
    const auto ds = generate_synthetic(4000, 0.5, 0.0, 3);
    double sums[2] = {0, 0};
    for (const auto& r : ds.rows) sums[r.label] += r.x[feature::kUrlLength];
    EXPECT_NEAR(sums[0] / 2000.0, sums[1] / 2000.0, 1.5);
}

TEST(SyntheticTest, DepthThreeTreeSeparatesDefaults) {
    const auto ds = generate_synthetic(2000, 0.1, kDefaultSeparation, 42);
    const auto [train, test] = stratified_split(ds, 0.25, 42);
    const auto tree = train_tree(train, TreeParams{3, 1});
    std::size_t correct = 0;
    for (const auto& r : test.rows) correct += (tree.predict(r.x) >= 0.5) == (r.label == 1) ? 1 : 0;
    EXPECT_GE(static_cast<double>(correct) / static_cast<double>(test.size()), 0.85);
}

TEST(SyntheticTest, RejectsBadArguments) {
    EXPECT_EQ(code_of([] { generate_synthetic(0, 0.1, 1.0, 1); }), ErrorCode::kInvalidConfig);
    EXPECT_EQ(code_of([] { generate_synthetic(10, 1.5, 1.0, 1); }), ErrorCode::kInvalidConfig);
    EXPECT_EQ(code_of([] { generate_synthetic(10, 0.1, -1.0, 1); }), ErrorCode::kInvalidConfig);
}

TEST(CsvTest, ValidTwoRows) {
    const auto ds = parse_csv("a,b,label\n1,2.5,0\n-3,4e2,1\n");
    ASSERT_EQ(ds.size(), 2u);
    EXPECT_EQ(ds.feature_names, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(ds.rows[1].x, (FeatureVector{-3, 400}));
    EXPECT_EQ(ds.rows[1].label, 1);
}

TEST(CsvTest, BadLabelIsSchemaError) {
    EXPECT_EQ(code_of([] { parse_csv("a,label\n1,2\n"); }), ErrorCode::kSchemaError);
    EXPECT_EQ(code_of([] { parse_csv("a,b\n1,0\n"); }), ErrorCode::kSchemaError);
}

TEST(CsvTest, NonNumericCellNamesRowAndColumn) {
    try {
        parse_csv("a,b,label\n1,2,0\n1,oops,1\n", "data.csv");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kParseError);
        const std::string msg = e.what();
        EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
        EXPECT_NE(msg.find("'b'"), std::string::npos) << msg;
        EXPECT_NE(msg.find("data.csv"), std::string::npos) << msg;
    }
    EXPECT_EQ(code_of([] { parse_csv("a,label\nnan,0\n"); }), ErrorCode::kParseError);
    EXPECT_EQ(code_of([] { parse_csv("a,label\n1,2,0\n"); }), ErrorCode::kParseError);
}

TEST(CsvTest, RoundTripIsExact) {
    const auto ds = generate_synthetic(200, 0.25, 1.0, 5);
    const auto text = to_csv(ds);
    const auto back = parse_csv(text);
    EXPECT_EQ(back.rows, ds.rows);
    EXPECT_EQ(to_csv(back), text);

    const auto path = std::filesystem::temp_directory_path() / "sentinel_csv_roundtrip.csv";
    write_csv(ds, path);
    EXPECT_EQ(load_csv(path).rows, ds.rows);
    std::filesystem::remove(path);
    EXPECT_EQ(code_of([&] { load_csv(path); }), ErrorCode::kIoError);
}

TEST(SplitTest, ExactStratification) {
    const auto ds = make(80, 20);
    const auto [train, test] = stratified_split(ds, 0.25, 3);
    EXPECT_EQ(test.count_label(0), 20u);
    EXPECT_EQ(test.count_label(1), 5u);
    EXPECT_EQ(train.count_label(0), 60u);
    EXPECT_EQ(train.count_label(1), 15u);
}

TEST(SplitTest, DeterministicAndValidated) {
    const auto ds = make(50, 10);
    EXPECT_EQ(stratified_split(ds, 0.3, 8).second.rows, stratified_split(ds, 0.3, 8).second.rows);
    EXPECT_EQ(code_of([&] { stratified_split(ds, 0.0, 1); }), ErrorCode::kInvalidConfig);
    EXPECT_EQ(code_of([&] { stratified_split(ds, 1.0, 1); }), ErrorCode::kInvalidConfig);
    EXPECT_EQ(code_of([&] { stratified_split(make(10, 1), 0.5, 1); }), ErrorCode::kInvalidConfig);
}

TEST(NormalizerTest, Examples) {
    LabeledDataset ds;
    ds.feature_names = {"a", "c"};
    ds.rows = {{{0, 3}, 0}, {{10, 3}, 1}};
    const auto n = Normalizer::fit(ds);
    EXPECT_EQ(n.apply(FeatureVector{5, 3}), (FeatureVector{0.5, 0.5}));
    EXPECT_EQ(n.apply(FeatureVector{20, -100}), (FeatureVector{1.0, 0.5}));
    EXPECT_EQ(n.apply(FeatureVector{-1, 3})[0], 0.0);
    EXPECT_EQ(code_of([&] { n.apply(FeatureVector{1}); }), ErrorCode::kDimensionMismatch);
}

TEST(UndersampleTest, Examples) {
    const auto ds = make(90, 10);
    const auto out = random_undersample(ds, 4);
    EXPECT_EQ(out.count_label(0), 10u);
    EXPECT_EQ(out.count_label(1), 10u);
    EXPECT_EQ(random_undersample(ds, 4).rows, out.rows);

    const auto balanced = make(15, 15);
    auto a = random_undersample(balanced, 2).rows;
    auto b = balanced.rows;
    auto by_x = [](const LabeledRow& l, const LabeledRow& r) { return l.x < r.x; };
    std::sort(a.begin(), a.end(), by_x);
    std::sort(b.begin(), b.end(), by_x);
    EXPECT_EQ(a, b);
}

TEST(SmoteTest, TwoPointSegment) {
    LabeledDataset ds;
    ds.feature_names = {"x", "y"};
    ds.rows = {{{0, 0}, 1}, {{1, 1}, 1}};
    for (int i = 0; i < 10; ++i) ds.rows.push_back({{5.0 + i, -3.0}, 0});
    const auto out = smote(ds, 1, 6);
    EXPECT_EQ(out.count_label(1), 10u);
    for (std::size_t i = ds.size(); i < out.size(); ++i) {
        const auto& p = out.rows[i].x;
        EXPECT_EQ(p[0], p[1]);
        EXPECT_GE(p[0], 0.0);
        EXPECT_LE(p[0], 1.0);
    }
}

TEST(SmoteTest, BalancesAndStaysOnSegments) {
    const auto ds = make(90, 10, 3, 12);
    const auto out = smote(ds, 5, 21);
    EXPECT_EQ(out.count_label(0), 90u);
    EXPECT_EQ(out.count_label(1), 90u);
    const auto g = oracle::check_smote_geometry(ds, out, 5);
    EXPECT_EQ(g.synthetic, 80u);
    EXPECT_EQ(g.outside_box, 0u);
    EXPECT_EQ(g.off_segment, 0u);
}

TEST(SmoteTest, Validation) {
    EXPECT_EQ(code_of([] { smote(make(10, 1), 5, 1); }), ErrorCode::kInvalidConfig);
    EXPECT_EQ(code_of([] { smote(make(10, 3), 0, 1); }), ErrorCode::kInvalidConfig);
}

}  // namespace
}  // namespace sentinel
