#include "sentinel/models/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sentinel/error.hpp"
#include "sentinel/rng.hpp"

namespace sentinel {

double RandomForest::predict(std::span<const double> x) const {
    if (trees.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& t : trees) sum += t.predict(x);
    return sum / static_cast<double>(trees.size());
}

RandomForest train_forest(const LabeledDataset& ds, const ForestParams& params, kernels::Exec exec) {
    if (params.n_trees < 1) throw Error(ErrorCode::kInvalidConfig, "forest needs n_trees >= 1");
    if (ds.rows.empty()) throw Error(ErrorCode::kInvalidConfig, "cannot train a forest on an empty dataset");
    const std::size_t d = ds.dim();
    const std::size_t n = ds.size();
    const std::size_t subset = params.max_features == 0
                                   ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))))
                                   : std::min(params.max_features, d);

    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    rows.reserve(n);
    for (const auto& r : ds.rows) {
        rows.push_back(r.x);
        y.push_back(static_cast<double>(r.label));
    }
    const auto x = kernels::ColumnMatrix::from_rows(rows, d);

    RandomForest forest;
    forest.params = params;
    forest.trees.resize(static_cast<std::size_t>(params.n_trees));
    forest.feature_subsets.resize(forest.trees.size());

    auto build = [&](std::size_t t) {
        Rng rng(derive_seed(params.seed, t));
        std::vector<std::size_t> features(d);
        std::iota(features.begin(), features.end(), std::size_t{0});
        if (subset < d) {
            rng.shuffle(features);
            features.resize(subset);
            std::sort(features.begin(), features.end());
        }
        std::vector<std::size_t> samples(n);
        if (params.bootstrap) {
            for (auto& s : samples) s = rng.below(n);
        } else {
            std::iota(samples.begin(), samples.end(), std::size_t{0});
        }
        forest.trees[t] = grow_tree(x, y, std::move(samples), features, kernels::Criterion::kGini, params.tree);
        forest.feature_subsets[t] = std::move(features);
    };

    const auto count = static_cast<std::ptrdiff_t>(forest.trees.size());
    if (exec == kernels::Exec::kParallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t t = 0; t < count; ++t) build(static_cast<std::size_t>(t));
    } else {
        for (std::ptrdiff_t t = 0; t < count; ++t) build(static_cast<std::size_t>(t));
    }
    return forest;
}

}  // namespace sentinel
