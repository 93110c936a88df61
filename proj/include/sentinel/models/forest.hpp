#pragma once

#include <cstdint>
#include <vector>

#include "sentinel/models/tree.hpp"

namespace sentinel {

struct ForestParams {
    int n_trees = 50;
    bool bootstrap = true;
    // Features drawn per tree; 0 means ceil(sqrt(d)).
    std::size_t max_features = 0;
    TreeParams tree{8, 1};
    std::uint64_t seed = 42;
};

class RandomForest {
public:
    std::vector<DecisionTree> trees;
    std::vector<std::vector<std::size_t>> feature_subsets;
    ForestParams params;

    // Arithmetic mean of the member trees' predictions.
    double predict(std::span<const double> x) const;
};

// Tree i draws its bootstrap sample and feature subset from an independent
// stream derived from (seed, i), so the parallel path builds the same forest.
RandomForest train_forest(const LabeledDataset& ds, const ForestParams& params,
                          kernels::Exec exec = kernels::Exec::kSerial);

}  // namespace sentinel
