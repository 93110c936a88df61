#include "sentinel/models/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sentinel/error.hpp"
#include "sentinel/manifest.hpp"
#include "sentinel/rng.hpp"

namespace sentinel {

using nlohmann::json;

void AggregationWeights::validate() const {
    const auto w = as_array();
    double sum = 0.0;
    for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::kInvalidWeights, "aggregation weights must be >= 0");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw Error(ErrorCode::kInvalidWeights, "aggregation weights sum to " + std::to_string(sum) + ", expected 1");
    }
}

std::string_view resample_name(Resample r) {
    switch (r) {
        case Resample::kNone: return "none";
        case Resample::kUndersample: return "undersample";
        case Resample::kSmote: return "smote";
    }
    return "none";
}

Resample parse_resample(std::string_view name) {
    for (auto r : {Resample::kNone, Resample::kUndersample, Resample::kSmote}) {
        if (resample_name(r) == name) return r;
    }
    throw Error(ErrorCode::kInvalidConfig, "unknown resampling mode '" + std::string(name) + "'");
}

namespace {

std::vector<double> column_medians(const LabeledDataset& ds) {
    std::vector<double> medians(ds.dim(), 0.0);
    std::vector<double> column(ds.size());
    for (std::size_t c = 0; c < ds.dim(); ++c) {
        for (std::size_t r = 0; r < ds.size(); ++r) column[r] = ds.rows[r].x[c];
        medians[c] = percentile(column, 50.0);
    }
    return medians;
}

}  // namespace

Ensemble train_ensemble(const LabeledDataset& train, const EnsembleParams& params, kernels::Exec exec) {
    train.validate();
    if (train.rows.empty()) throw Error(ErrorCode::kInvalidConfig, "training set is empty");
    params.weights.validate();

    Ensemble e;
    e.manifest = train.feature_names;
    e.training_seed = params.seed;
    e.weights = params.weights;
    e.normalizer = Normalizer::fit(train);
    e.medians = column_medians(train);

    const auto normalized = e.normalizer.apply(train);
    LabeledDataset fit_set;
    switch (params.resample) {
        case Resample::kNone: fit_set = normalized; break;
        case Resample::kUndersample: fit_set = random_undersample(normalized, derive_seed(params.seed, 10)); break;
        case Resample::kSmote: fit_set = smote(normalized, params.smote_k, derive_seed(params.seed, 11)); break;
    }

    e.tree = train_tree(fit_set, params.tree, std::nullopt, exec);

    auto forest_params = params.forest;
    forest_params.seed = derive_seed(params.seed, 1);
    e.forest = train_forest(fit_set, forest_params, exec);

    e.gbm = train_gbm(fit_set, params.gbm, nullptr, exec);

    auto mlp_params = params.mlp;
    mlp_params.seed = derive_seed(params.seed, 2);
    e.mlp = train_mlp(fit_set, mlp_params);

    auto svm_params = params.svm;
    svm_params.seed = derive_seed(params.seed, 3);
    e.svm = train_svm(fit_set, svm_params);

    std::vector<std::vector<double>> legit;
    for (const auto& r : normalized.rows) {
        if (r.label == 0) legit.push_back(r.x);
    }
    auto ae_params = params.autoencoder;
    ae_params.seed = derive_seed(params.seed, 4);
    e.autoencoder = train_autoencoder(legit, ae_params);
    return e;
}

ModelOutputs ensemble_predict(const Ensemble& e, std::span<const double> x) {
    if (x.size() != e.dim()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "feature vector has " + std::to_string(x.size()) + " entries, bundle expects " + std::to_string(e.dim()));
    }
    const auto z = e.normalizer.apply(FeatureVector(x.begin(), x.end()));
    ModelOutputs out;
    out.tree = e.tree.predict(z);
    out.forest = e.forest.predict(z);
    out.gbm = e.gbm.predict(z);
    out.mlp = e.mlp.predict(z);
    out.svm = e.svm.predict(z);
    out.anomaly_score = e.autoencoder.anomaly_score(z);
    out.anomaly_flag = out.anomaly_score > e.autoencoder.anomaly_threshold;
    return out;
}

std::vector<ModelOutputs> predict_batch(const Ensemble& e, std::span<const FeatureVector> rows, kernels::Exec exec) {
    std::vector<ModelOutputs> out(rows.size());
    const auto n = static_cast<std::ptrdiff_t>(rows.size());
    if (exec == kernels::Exec::kParallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = ensemble_predict(e, rows[i]);
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = ensemble_predict(e, rows[i]);
    }
    return out;
}

// --- Bundle serialization -------------------------------------------------------

namespace {

json tree_to_json(const DecisionTree& t) {
    json nodes = json::array();
    for (const auto& n : t.nodes) {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"value", n.value},
                         {"sample_count", n.sample_count}});
    }
    return {{"max_depth", t.params.max_depth},
            {"min_samples_leaf", t.params.min_samples_leaf},
            {"feature_count", t.feature_count},
            {"nodes", std::move(nodes)}};
}

DecisionTree tree_from_json(const json& j) {
    DecisionTree t;
    t.params.max_depth = j.at("max_depth").get<int>();
    t.params.min_samples_leaf = j.at("min_samples_leaf").get<std::size_t>();
    t.feature_count = j.at("feature_count").get<std::size_t>();
    for (const auto& n : j.at("nodes")) {
        TreeNode node;
        node.feature = n.at("feature").get<int>();
        node.threshold = n.at("threshold").get<double>();
        node.left = n.at("left").get<int>();
        node.right = n.at("right").get<int>();
        node.value = n.at("value").get<double>();
        node.sample_count = n.at("sample_count").get<std::size_t>();
        t.nodes.push_back(node);
    }
    const auto count = static_cast<int>(t.nodes.size());
    for (const auto& node : t.nodes) {
        if (!node.is_leaf() && (node.left <= 0 || node.left >= count || node.right <= 0 || node.right >= count ||
                                static_cast<std::size_t>(node.feature) >= t.feature_count)) {
            throw Error(ErrorCode::kSchemaError, "tree node references out of range");
        }
    }
    return t;
}

json network_to_json(const Network& net) {
    json layers = json::array();
    for (const auto& l : net.layers) {
        layers.push_back({{"inputs", l.inputs},
                          {"outputs", l.outputs},
                          {"activation", activation_name(l.activation)},
                          {"weights", l.weights},
                          {"biases", l.biases}});
    }
    return layers;
}

Network network_from_json(const json& j) {
    Network net;
    for (const auto& l : j) {
        DenseLayer layer;
        layer.inputs = l.at("inputs").get<std::size_t>();
        layer.outputs = l.at("outputs").get<std::size_t>();
        layer.activation = parse_activation(l.at("activation").get<std::string>());
        layer.weights = l.at("weights").get<std::vector<double>>();
        layer.biases = l.at("biases").get<std::vector<double>>();
        if (layer.weights.size() != layer.inputs * layer.outputs || layer.biases.size() != layer.outputs) {
            throw Error(ErrorCode::kSchemaError, "dense layer shape mismatch");
        }
        if (!net.layers.empty() && net.layers.back().outputs != layer.inputs) {
            throw Error(ErrorCode::kSchemaError, "dense layers do not chain");
        }
        net.layers.push_back(std::move(layer));
    }
    return net;
}

}  // namespace

json bundle_to_json(const Ensemble& e) {
    json forest_trees = json::array();
    for (const auto& t : e.forest.trees) forest_trees.push_back(tree_to_json(t));
    json stages = json::array();
    for (const auto& s : e.gbm.stages) stages.push_back({{"learning_rate", s.learning_rate}, {"tree", tree_to_json(s.tree)}});

    return {
        {"format_version", e.format_version},
        {"manifest", e.manifest},
        {"training_seed", e.training_seed},
        {"normalizer", {{"min", e.normalizer.min()}, {"max", e.normalizer.max()}}},
        {"medians", e.medians},
        {"tree", tree_to_json(e.tree)},
        {"forest",
         {{"n_trees", e.forest.params.n_trees},
          {"bootstrap", e.forest.params.bootstrap},
          {"max_features", e.forest.params.max_features},
          {"seed", e.forest.params.seed},
          {"feature_subsets", e.forest.feature_subsets},
          {"trees", std::move(forest_trees)}}},
        {"gbm",
         {{"base_log_odds", e.gbm.base_log_odds},
          {"degenerate_base_rate", e.gbm.degenerate_base_rate},
          {"stages", std::move(stages)}}},
        {"svm", {{"weights", e.svm.weights}, {"bias", e.svm.bias}, {"lambda", e.svm.lambda}}},
        {"mlp", {{"layers", network_to_json(e.mlp.net)}}},
        {"autoencoder",
         {{"anomaly_threshold", e.autoencoder.anomaly_threshold}, {"layers", network_to_json(e.autoencoder.net)}}},
        {"weights",
         {{"tree", e.weights.tree},
          {"forest", e.weights.forest},
          {"gbm", e.weights.gbm},
          {"mlp", e.weights.mlp},
          {"svm", e.weights.svm}}},
    };
}

Ensemble bundle_from_json(const json& doc) {
    try {
        if (!doc.is_object()) throw Error(ErrorCode::kSchemaError, "bundle must be a JSON object");
        static const std::vector<std::string> kKeys{"format_version", "manifest", "training_seed", "normalizer",
                                                    "medians",        "tree",     "forest",        "gbm",
                                                    "svm",            "mlp",      "autoencoder",   "weights"};
        for (const auto& [key, value] : doc.items()) {
            if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
                throw Error(ErrorCode::kSchemaError, "unknown bundle field '" + key + "'");
            }
        }
        Ensemble e;
        e.format_version = doc.at("format_version").get<int>();
        if (e.format_version != kBundleFormatVersion) {
            throw Error(ErrorCode::kSchemaError, "unsupported bundle format_version " + std::to_string(e.format_version));
        }
        e.manifest = doc.at("manifest").get<std::vector<std::string>>();
        if (e.manifest != default_manifest()) {
            throw Error(ErrorCode::kSchemaError, "bundle manifest does not match the feature layout");
        }
        e.training_seed = doc.at("training_seed").get<std::uint64_t>();
        const auto& norm = doc.at("normalizer");
        e.normalizer = Normalizer(norm.at("min").get<std::vector<double>>(), norm.at("max").get<std::vector<double>>());
        e.medians = doc.at("medians").get<std::vector<double>>();
        e.tree = tree_from_json(doc.at("tree"));

        const auto& forest = doc.at("forest");
        e.forest.params.n_trees = forest.at("n_trees").get<int>();
        e.forest.params.bootstrap = forest.at("bootstrap").get<bool>();
        e.forest.params.max_features = forest.at("max_features").get<std::size_t>();
        e.forest.params.seed = forest.at("seed").get<std::uint64_t>();
        e.forest.feature_subsets = forest.at("feature_subsets").get<std::vector<std::vector<std::size_t>>>();
        for (const auto& t : forest.at("trees")) e.forest.trees.push_back(tree_from_json(t));
        if (!e.forest.trees.empty()) e.forest.params.tree = e.forest.trees.front().params;

        const auto& gbm = doc.at("gbm");
        e.gbm.base_log_odds = gbm.at("base_log_odds").get<double>();
        e.gbm.degenerate_base_rate = gbm.at("degenerate_base_rate").get<bool>();
        for (const auto& s : gbm.at("stages")) {
            e.gbm.stages.push_back({tree_from_json(s.at("tree")), s.at("learning_rate").get<double>()});
        }

        const auto& svm = doc.at("svm");
        e.svm.weights = svm.at("weights").get<std::vector<double>>();
        e.svm.bias = svm.at("bias").get<double>();
        e.svm.lambda = svm.at("lambda").get<double>();

        e.mlp.net = network_from_json(doc.at("mlp").at("layers"));
        const auto& ae = doc.at("autoencoder");
        e.autoencoder.anomaly_threshold = ae.at("anomaly_threshold").get<double>();
        e.autoencoder.net = network_from_json(ae.at("layers"));

        const auto& w = doc.at("weights");
        e.weights = {w.at("tree").get<double>(), w.at("forest").get<double>(), w.at("gbm").get<double>(),
                     w.at("mlp").get<double>(), w.at("svm").get<double>()};
        e.weights.validate();

        const auto d = e.manifest.size();
        if (e.normalizer.dim() != d || e.medians.size() != d || e.svm.weights.size() != d ||
            e.mlp.net.input_dim() != d || e.autoencoder.net.input_dim() != d || e.autoencoder.net.output_dim() != d ||
            e.mlp.net.output_dim() != 1 || e.tree.feature_count != d) {
            throw Error(ErrorCode::kSchemaError, "bundle models disagree with the manifest width");
        }
        return e;
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::kSchemaError, std::string("bundle: ") + ex.what());
    }
}

std::string serialize_bundle(const Ensemble& e) { return bundle_to_json(e).dump(1) + "\n"; }

void save_bundle(const Ensemble& e, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write bundle " + path.string());
    out << serialize_bundle(e);
    if (!out) throw Error(ErrorCode::kIoError, "write failed for bundle " + path.string());
}

Ensemble load_bundle(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIoError, "cannot open bundle " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::kParseError, path.string() + ": " + ex.what());
    }
    return bundle_from_json(doc);
}

}  // namespace sentinel
