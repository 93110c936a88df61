#include "sentinel/models/tree.hpp"

#include <algorithm>
#include <numeric>

#include "sentinel/error.hpp"

namespace sentinel {

namespace {

struct Builder {
    const kernels::ColumnMatrix& x;
    std::span<const double> y;
    std::span<const std::size_t> features;
    kernels::Criterion criterion;
    const TreeParams& params;
    kernels::Exec exec;
    std::vector<TreeNode>& nodes;

    int build(const std::vector<std::size_t>& samples, int depth) {
        const int id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        double sum = 0.0;
        for (auto s : samples) sum += y[s];
        const double n = static_cast<double>(samples.size());
        nodes[id].value = n > 0 ? sum / n : 0.0;
        nodes[id].sample_count = samples.size();

        if (depth >= params.max_depth || samples.size() < 2 * params.min_samples_leaf || is_pure(samples)) return id;

        const auto split = kernels::best_split(x, y, samples, features, criterion, params.min_samples_leaf, exec);
        if (!split.found) return id;

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto s : samples) (x(s, split.feature) <= split.threshold ? left : right).push_back(s);

        const int l = build(left, depth + 1);
        const int r = build(right, depth + 1);
        nodes[id].feature = static_cast<int>(split.feature);
        nodes[id].threshold = split.threshold;
        nodes[id].left = l;
        nodes[id].right = r;
        return id;
    }

    bool is_pure(const std::vector<std::size_t>& samples) const {
        return std::all_of(samples.begin(), samples.end(), [&](std::size_t s) { return y[s] == y[samples.front()]; });
    }
};

int depth_from(const std::vector<TreeNode>& nodes, int id) {
    const auto& node = nodes[id];
    if (node.is_leaf()) return 0;
    return 1 + std::max(depth_from(nodes, node.left), depth_from(nodes, node.right));
}

}  // namespace

double DecisionTree::predict(std::span<const double> x) const {
    if (x.size() != feature_count) {
        throw Error(ErrorCode::kDimensionMismatch, "tree expects " + std::to_string(feature_count) + " features, got " +
                                                       std::to_string(x.size()));
    }
    if (nodes.empty()) return 0.0;
    int id = 0;
    while (!nodes[id].is_leaf()) {
        const auto& node = nodes[id];
        id = x[node.feature] <= node.threshold ? node.left : node.right;
    }
    return nodes[id].value;
}

int DecisionTree::depth() const { return nodes.empty() ? 0 : depth_from(nodes, 0); }

std::size_t DecisionTree::leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

DecisionTree grow_tree(const kernels::ColumnMatrix& x, std::span<const double> y, std::vector<std::size_t> samples,
                       std::span<const std::size_t> features, kernels::Criterion criterion, const TreeParams& params,
                       kernels::Exec exec) {
    if (params.max_depth < 0) throw Error(ErrorCode::kInvalidConfig, "max_depth must be >= 0");
    if (params.min_samples_leaf < 1) throw Error(ErrorCode::kInvalidConfig, "min_samples_leaf must be >= 1");
    if (samples.empty()) throw Error(ErrorCode::kInvalidConfig, "cannot grow a tree on zero samples");
    for (auto f : features) {
        if (f >= x.cols) throw Error(ErrorCode::kInvalidConfig, "feature index " + std::to_string(f) + " out of range");
    }

    DecisionTree tree;
    tree.params = params;
    tree.feature_count = x.cols;
    Builder builder{x, y, features, criterion, params, exec, tree.nodes};
    builder.build(samples, 0);
    return tree;
}

DecisionTree train_tree(const LabeledDataset& ds, const TreeParams& params, std::optional<std::vector<std::size_t>> features,
                        kernels::Exec exec) {
    if (ds.rows.empty()) throw Error(ErrorCode::kInvalidConfig, "cannot train a tree on an empty dataset");
    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    rows.reserve(ds.size());
    for (const auto& r : ds.rows) {
        rows.push_back(r.x);
        y.push_back(static_cast<double>(r.label));
    }
    const auto x = kernels::ColumnMatrix::from_rows(rows, ds.dim());
    if (!features) {
        features.emplace(ds.dim());
        std::iota(features->begin(), features->end(), std::size_t{0});
    }
    std::vector<std::size_t> samples(ds.size());
    std::iota(samples.begin(), samples.end(), std::size_t{0});
    return grow_tree(x, y, std::move(samples), *features, kernels::Criterion::kGini, params, exec);
}

}  // namespace sentinel
