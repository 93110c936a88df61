#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sentinel/dataset.hpp"
#include "sentinel/kernels.hpp"
#include "sentinel/models/forest.hpp"
#include "sentinel/models/gbm.hpp"
#include "sentinel/models/neural.hpp"
#include "sentinel/models/svm.hpp"
#include "sentinel/models/tree.hpp"

namespace sentinel {

inline constexpr int kBundleFormatVersion = 1;
inline constexpr std::size_t kProbabilityModels = 5;

// Weights over the five probability models, in staging order
// tree, forest, gbm, mlp, svm.
struct AggregationWeights {
    double tree = 0.15;
    double forest = 0.25;
    double gbm = 0.25;
    double mlp = 0.20;
    double svm = 0.15;

    std::array<double, kProbabilityModels> as_array() const { return {tree, forest, gbm, mlp, svm}; }
    static AggregationWeights uniform() { return {0.2, 0.2, 0.2, 0.2, 0.2}; }
    // Throws Error{kInvalidWeights} unless all weights are >= 0 and sum to 1 +- 1e-9.
    void validate() const;
};

struct ModelOutputs {
    double tree = 0.0;
    double forest = 0.0;
    double gbm = 0.0;
    double mlp = 0.0;
    double svm = 0.0;
    double anomaly_score = 0.0;
    bool anomaly_flag = false;

    std::array<double, kProbabilityModels> probabilities() const { return {tree, forest, gbm, mlp, svm}; }
    bool operator==(const ModelOutputs&) const = default;
};

enum class Resample { kNone, kUndersample, kSmote };

std::string_view resample_name(Resample r);
Resample parse_resample(std::string_view name);

struct EnsembleParams {
    TreeParams tree{6, 2};
    ForestParams forest;
    GbmParams gbm;
    SvmParams svm;
    MlpParams mlp;
    AutoencoderParams autoencoder;
    AggregationWeights weights;
    Resample resample = Resample::kNone;
    int smote_k = 5;
    // Every model's seed derives from this one.
    std::uint64_t seed = 42;
};

class Ensemble {
public:
    int format_version = kBundleFormatVersion;
    std::vector<std::string> manifest;
    Normalizer normalizer;
    // Per-feature training medians on the raw scale, used by explanations.
    std::vector<double> medians;
    std::uint64_t training_seed = 0;

    DecisionTree tree;
    RandomForest forest;
    GradientBoosting gbm;
    Mlp mlp;
    LinearSvm svm;
    Autoencoder autoencoder;
    AggregationWeights weights;

    std::size_t dim() const { return manifest.size(); }
};

// Models fit the normalized (and optionally resampled) training set; the
// autoencoder fits the normalized legitimate rows before resampling.
Ensemble train_ensemble(const LabeledDataset& train, const EnsembleParams& params,
                        kernels::Exec exec = kernels::Exec::kParallel);

// `x` is raw-scaled. Models run in staging order (tree, forest; gbm, mlp;
// svm, autoencoder) and all outputs are always computed.
ModelOutputs ensemble_predict(const Ensemble& e, std::span<const double> x);

std::vector<ModelOutputs> predict_batch(const Ensemble& e, std::span<const FeatureVector> rows,
                                        kernels::Exec exec = kernels::Exec::kSerial);

nlohmann::json bundle_to_json(const Ensemble& e);
Ensemble bundle_from_json(const nlohmann::json& doc);
std::string serialize_bundle(const Ensemble& e);
void save_bundle(const Ensemble& e, const std::filesystem::path& path);
Ensemble load_bundle(const std::filesystem::path& path);

}  // namespace sentinel
