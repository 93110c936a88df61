#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sentinel/dataset.hpp"
#include "sentinel/kernels.hpp"

namespace sentinel {

struct TreeParams {
    int max_depth = 6;
    std::size_t min_samples_leaf = 1;
};

// Internal nodes have feature >= 0; leaves have feature == -1 and carry
// `value` (fraud fraction for classification trees, mean target for
// regression trees).
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    std::size_t sample_count = 0;

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

class DecisionTree {
public:
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    TreeParams params;
    std::size_t feature_count = 0;

    // Routes x (value <= threshold goes left) and returns the leaf value.
    // Throws Error{kDimensionMismatch}.
    double predict(std::span<const double> x) const;
    // Length of the longest root-to-leaf path, in edges.
    int depth() const;
    std::size_t leaf_count() const;
};

// Grows a tree on `samples` (indices into x / y) using only `features`.
DecisionTree grow_tree(const kernels::ColumnMatrix& x, std::span<const double> y, std::vector<std::size_t> samples,
                       std::span<const std::size_t> features, kernels::Criterion criterion, const TreeParams& params,
                       kernels::Exec exec = kernels::Exec::kSerial);

// CART classification tree with Gini impurity over all features, or over
// `features` when given.
DecisionTree train_tree(const LabeledDataset& ds, const TreeParams& params,
                        std::optional<std::vector<std::size_t>> features = std::nullopt,
                        kernels::Exec exec = kernels::Exec::kSerial);

}  // namespace sentinel
