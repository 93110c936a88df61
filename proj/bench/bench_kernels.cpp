// Serial reference vs OpenMP kernels on the default synthetic workload.

#include <benchmark/benchmark.h>

#include <numeric>

#include "sentinel/dataset.hpp"
#include "sentinel/kernels.hpp"
#include "sentinel/models/ensemble.hpp"
#include "sentinel/models/forest.hpp"

namespace {

using namespace sentinel;

const LabeledDataset& data() {
    static const LabeledDataset ds = Normalizer::fit(generate_synthetic(2000, 0.1, kDefaultSeparation, 42))
                                         .apply(generate_synthetic(2000, 0.1, kDefaultSeparation, 42));
    return ds;
}

kernels::Exec exec_of(const benchmark::State& state) {
    return state.range(0) ? kernels::Exec::kParallel : kernels::Exec::kSerial;
}

void BM_BestSplit(benchmark::State& state) {
    const auto& ds = data();
    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    for (const auto& r : ds.rows) {
        rows.push_back(r.x);
        y.push_back(r.label);
    }
    const auto x = kernels::ColumnMatrix::from_rows(rows, ds.dim());
    std::vector<std::size_t> samples(ds.size());
    std::iota(samples.begin(), samples.end(), 0);
    std::vector<std::size_t> features(ds.dim());
    std::iota(features.begin(), features.end(), 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            kernels::best_split(x, y, samples, features, kernels::Criterion::kGini, 1, exec_of(state)));
    }
}

void BM_KNearest(benchmark::State& state) {
    std::vector<std::vector<double>> points;
    for (const auto& r : data().rows) {
        if (r.label == 1) points.push_back(r.x);
    }
    for (auto _ : state) benchmark::DoNotOptimize(kernels::k_nearest(points, 5, exec_of(state)));
}

void BM_TrainForest(benchmark::State& state) {
    ForestParams params;
    for (auto _ : state) benchmark::DoNotOptimize(train_forest(data(), params, exec_of(state)));
}

void BM_PredictBatch(benchmark::State& state) {
    static const Ensemble e = train_ensemble(generate_synthetic(2000, 0.1, kDefaultSeparation, 42), EnsembleParams{});
    std::vector<FeatureVector> rows;
    for (const auto& r : generate_synthetic(2000, 0.1, kDefaultSeparation, 7).rows) rows.push_back(r.x);
    for (auto _ : state) benchmark::DoNotOptimize(predict_batch(e, rows, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_BestSplit)->Arg(0)->Arg(1)->ArgName("parallel");
BENCHMARK(BM_KNearest)->Arg(0)->Arg(1)->ArgName("parallel");
BENCHMARK(BM_TrainForest)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictBatch)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
