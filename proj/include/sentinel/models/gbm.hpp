#pragma once

#include <vector>

#include "sentinel/models/tree.hpp"

namespace sentinel {

struct GbmParams {
    int n_rounds = 50;
    double learning_rate = 0.1;
    int depth = 3;
    std::size_t min_samples_leaf = 1;
};

struct GbmStage {
    DecisionTree tree;  // regression tree on residuals
    double learning_rate = 0.0;
};

class GradientBoosting {
public:
    double base_log_odds = 0.0;
    std::vector<GbmStage> stages;
    // Set when training labels were all one class and the base rate was clamped.
    bool degenerate_base_rate = false;

    double raw_score(std::span<const double> x) const;
    // sigmoid(base + sum of learning_rate * stage(x)).
    double predict(std::span<const double> x) const;
};

inline constexpr double kBaseRateClamp = 1e-6;

// Logistic-loss boosting; each stage fits a variance-reduction regression tree
// to the residuals y - p. When `loss_trace` is given it receives the mean
// training log-loss before the first round and after every round.
GradientBoosting train_gbm(const LabeledDataset& ds, const GbmParams& params, std::vector<double>* loss_trace = nullptr,
                           kernels::Exec exec = kernels::Exec::kSerial);

double sigmoid(double z);
// Mean binary cross-entropy of probabilities against 0/1 labels.
double log_loss(std::span<const double> probabilities, std::span<const int> labels);

}  // namespace sentinel
