#include "sentinel/models/gbm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <spdlog/spdlog.h>

#include "sentinel/error.hpp"

namespace sentinel {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double log_loss(std::span<const double> probabilities, std::span<const int> labels) {
    if (probabilities.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const double p = std::clamp(probabilities[i], 1e-15, 1.0 - 1e-15);
        total -= labels[i] == 1 ? std::log(p) : std::log(1.0 - p);
    }
    return total / static_cast<double>(probabilities.size());
}

double GradientBoosting::raw_score(std::span<const double> x) const {
    double z = base_log_odds;
    for (const auto& stage : stages) z += stage.learning_rate * stage.tree.predict(x);
    return z;
}

double GradientBoosting::predict(std::span<const double> x) const { return sigmoid(raw_score(x)); }

GradientBoosting train_gbm(const LabeledDataset& ds, const GbmParams& params, std::vector<double>* loss_trace,
                           kernels::Exec exec) {
    if (params.n_rounds < 0) throw Error(ErrorCode::kInvalidConfig, "n_rounds must be >= 0");
    if (!(params.learning_rate >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "learning_rate must be >= 0");
    if (params.depth < 0) throw Error(ErrorCode::kInvalidConfig, "GBM depth must be >= 0");
    if (ds.rows.empty()) throw Error(ErrorCode::kInvalidConfig, "cannot train GBM on an empty dataset");

    const std::size_t n = ds.size();
    std::vector<int> labels(n);
    std::vector<std::vector<double>> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = ds.rows[i].label;
        rows.push_back(ds.rows[i].x);
    }

    GradientBoosting model;
    double base_rate = static_cast<double>(std::accumulate(labels.begin(), labels.end(), 0)) / static_cast<double>(n);
    if (base_rate < kBaseRateClamp || base_rate > 1.0 - kBaseRateClamp) {
        spdlog::warn("GBM training labels are all one class; clamping the base rate");
        model.degenerate_base_rate = true;
        base_rate = std::clamp(base_rate, kBaseRateClamp, 1.0 - kBaseRateClamp);
    }
    model.base_log_odds = std::log(base_rate / (1.0 - base_rate));

    const auto x = kernels::ColumnMatrix::from_rows(rows, ds.dim());
    std::vector<std::size_t> features(ds.dim());
    std::iota(features.begin(), features.end(), std::size_t{0});
    std::vector<std::size_t> samples(n);
    std::iota(samples.begin(), samples.end(), std::size_t{0});

    std::vector<double> raw(n, model.base_log_odds);
    std::vector<double> prob(n);
    std::vector<double> residual(n);
    auto refresh = [&] {
        for (std::size_t i = 0; i < n; ++i) prob[i] = sigmoid(raw[i]);
        if (loss_trace) loss_trace->push_back(log_loss(prob, labels));
    };
    refresh();

    const TreeParams stage_params{params.depth, params.min_samples_leaf};
    for (int round = 0; round < params.n_rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) residual[i] = labels[i] - prob[i];
        GbmStage stage{grow_tree(x, residual, samples, features, kernels::Criterion::kVariance, stage_params, exec),
                       params.learning_rate};
        for (std::size_t i = 0; i < n; ++i) raw[i] += stage.learning_rate * stage.tree.predict(rows[i]);
        model.stages.push_back(std::move(stage));
        refresh();
    }
    return model;
}

}  // namespace sentinel
