#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sentinel/dataset.hpp"

namespace sentinel {

struct SvmParams {
    double lambda = 1e-3;
    int epochs = 20;
    std::uint64_t seed = 42;
};

class LinearSvm {
public:
    std::vector<double> weights;
    double bias = 0.0;
    double lambda = 0.0;

    double decision(std::span<const double> x) const;
    // sigmoid(decision(x)); a probability proxy, not a calibrated estimate.
    double predict(std::span<const double> x) const;
};

LinearSvm zero_svm(std::size_t dim, double lambda);

struct SvmSubgradient {
    std::vector<double> weights;
    double bias = 0.0;
};

// Subgradient of (lambda/2)(|w|^2 + b^2) + max(0, 1 - y f(x)) at one sample,
// y in {-1, +1}. The bias is treated as the weight of a constant-1 input.
SvmSubgradient svm_subgradient(const LinearSvm& svm, std::span<const double> x, int y);

// Pegasos: one pass per epoch over a seeded permutation, step 1 / (lambda t).
LinearSvm train_svm(const LabeledDataset& ds, const SvmParams& params);

}  // namespace sentinel
