#include "sentinel/models/svm.hpp"

#include <numeric>

#include "sentinel/error.hpp"
#include "sentinel/models/gbm.hpp"
#include "sentinel/rng.hpp"

namespace sentinel {

double LinearSvm::decision(std::span<const double> x) const {
    if (x.size() != weights.size()) {
        throw Error(ErrorCode::kDimensionMismatch, "SVM expects " + std::to_string(weights.size()) + " features, got " +
                                                       std::to_string(x.size()));
    }
    double z = bias;
    for (std::size_t i = 0; i < x.size(); ++i) z += weights[i] * x[i];
    return z;
}

double LinearSvm::predict(std::span<const double> x) const { return sigmoid(decision(x)); }

LinearSvm zero_svm(std::size_t dim, double lambda) {
    LinearSvm svm;
    svm.weights.assign(dim, 0.0);
    svm.lambda = lambda;
    return svm;
}

SvmSubgradient svm_subgradient(const LinearSvm& svm, std::span<const double> x, int y) {
    SvmSubgradient g;
    g.weights.resize(svm.weights.size());
    for (std::size_t i = 0; i < g.weights.size(); ++i) g.weights[i] = svm.lambda * svm.weights[i];
    g.bias = svm.lambda * svm.bias;
    if (y * svm.decision(x) < 1.0) {
        for (std::size_t i = 0; i < g.weights.size(); ++i) g.weights[i] -= y * x[i];
        g.bias -= y;
    }
    return g;
}

LinearSvm train_svm(const LabeledDataset& ds, const SvmParams& params) {
    if (!(params.lambda > 0.0)) throw Error(ErrorCode::kInvalidConfig, "SVM lambda must be > 0 for Pegasos steps");
    if (params.epochs < 0) throw Error(ErrorCode::kInvalidConfig, "SVM epochs must be >= 0");
    if (ds.count_label(0) == 0 || ds.count_label(1) == 0) {
        throw Error(ErrorCode::kInvalidConfig, "SVM training needs both classes");
    }

    LinearSvm svm = zero_svm(ds.dim(), params.lambda);
    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(params.seed);
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        rng.shuffle(order);
        for (auto i : order) {
            ++t;
            const double eta = 1.0 / (params.lambda * static_cast<double>(t));
            const auto g = svm_subgradient(svm, ds.rows[i].x, ds.rows[i].label == 1 ? 1 : -1);
            for (std::size_t k = 0; k < svm.weights.size(); ++k) svm.weights[k] -= eta * g.weights[k];
            svm.bias -= eta * g.bias;
        }
    }
    return svm;
}

}  // namespace sentinel
