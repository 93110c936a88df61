#include "sentinel/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sentinel/error.hpp"

namespace sentinel {

using nlohmann::json;

namespace {

// Reads members of one JSON object, rejecting any key not consumed.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("must be an object");
    }

    template <class T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw Error(ErrorCode::kInvalidConfig, path_ + "." + key + " has the wrong type");
        }
    }

    void read_path(const char* key, std::optional<std::filesystem::path>& out) {
        std::string s;
        seen_.insert(key);
        if (!j_.contains(key)) return;
        if (j_.at(key).is_null()) {
            out.reset();
            return;
        }
        read(key, s);
        out = s;
    }

    std::optional<Section> child(const char* key) {
        seen_.insert(key);
        if (!j_.contains(key)) return std::nullopt;
        return Section(j_.at(key), path_ + "." + key);
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) fail("unknown key '" + key + "'");
        }
    }

    [[noreturn]] void fail(const std::string& what) const { throw Error(ErrorCode::kInvalidConfig, path_ + ": " + what); }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_tree(Section s, TreeParams& p) {
    s.read("max_depth", p.max_depth);
    s.read("min_samples_leaf", p.min_samples_leaf);
    s.finish();
}

void read_models(Section s, EnsembleParams& m) {
    if (auto c = s.child("tree")) read_tree(*c, m.tree);
    if (auto c = s.child("forest")) {
        c->read("n_trees", m.forest.n_trees);
        c->read("bootstrap", m.forest.bootstrap);
        c->read("max_features", m.forest.max_features);
        c->read("max_depth", m.forest.tree.max_depth);
        c->read("min_samples_leaf", m.forest.tree.min_samples_leaf);
        c->finish();
    }
    if (auto c = s.child("gbm")) {
        c->read("n_rounds", m.gbm.n_rounds);
        c->read("learning_rate", m.gbm.learning_rate);
        c->read("depth", m.gbm.depth);
        c->read("min_samples_leaf", m.gbm.min_samples_leaf);
        c->finish();
    }
    if (auto c = s.child("svm")) {
        c->read("lambda", m.svm.lambda);
        c->read("epochs", m.svm.epochs);
        c->finish();
    }
    if (auto c = s.child("mlp")) {
        c->read("hidden", m.mlp.hidden);
        c->read("learning_rate", m.mlp.learning_rate);
        c->read("epochs", m.mlp.epochs);
        c->read("batch_size", m.mlp.batch_size);
        c->finish();
    }
    if (auto c = s.child("autoencoder")) {
        auto& a = m.autoencoder;
        c->read("bottleneck", a.bottleneck);
        c->read("learning_rate", a.learning_rate);
        c->read("epochs", a.epochs);
        c->read("batch_size", a.batch_size);
        c->read("threshold_percentile", a.threshold_percentile);
        std::string hidden(activation_name(a.hidden_activation));
        std::string output(activation_name(a.output_activation));
        c->read("hidden_activation", hidden);
        c->read("output_activation", output);
        try {
            a.hidden_activation = parse_activation(hidden);
            a.output_activation = parse_activation(output);
        } catch (const Error& e) {
            c->fail(e.what());
        }
        c->finish();
    }
    std::string resample(resample_name(m.resample));
    s.read("resample", resample);
    m.resample = parse_resample(resample);
    s.read("smote_k", m.smote_k);
    s.read("seed", m.seed);
    s.finish();
}

}  // namespace

void EngineConfig::validate() const {
    if (manifest != default_manifest()) {
        throw Error(ErrorCode::kInvalidConfig, "manifest must match the built-in feature layout");
    }
    try {
        models.weights.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::kInvalidConfig, e.what());
    }
    scoring.thresholds.validate();
    if (scoring.anomaly_floor < 0 || scoring.anomaly_floor > 100 || scoring.session_rule_floor < 0 ||
        scoring.session_rule_floor > 100) {
        throw Error(ErrorCode::kInvalidConfig, "score floors must lie in [0, 100]");
    }
    if (session.rapid_redirect_ms < 0 || session.hidden_redirect_lookback_ms < 0) {
        throw Error(ErrorCode::kInvalidConfig, "session thresholds must be >= 0");
    }
    if (young_domain_days < 0) throw Error(ErrorCode::kInvalidConfig, "young_domain_days must be >= 0");
    if (store.ttl_seconds <= 0) throw Error(ErrorCode::kInvalidConfig, "store.ttl_seconds must be > 0");
    if (models.smote_k < 1) throw Error(ErrorCode::kInvalidConfig, "smote_k must be >= 1");
    const auto& m = models;
    if (m.tree.max_depth < 0 || m.forest.tree.max_depth < 0 || m.gbm.depth < 0) {
        throw Error(ErrorCode::kInvalidConfig, "tree depths must be >= 0");
    }
    if (m.tree.min_samples_leaf < 1 || m.forest.tree.min_samples_leaf < 1 || m.gbm.min_samples_leaf < 1) {
        throw Error(ErrorCode::kInvalidConfig, "min_samples_leaf must be >= 1");
    }
    if (m.forest.n_trees < 1) throw Error(ErrorCode::kInvalidConfig, "forest.n_trees must be >= 1");
    if (m.gbm.n_rounds < 0 || !(m.gbm.learning_rate >= 0.0)) {
        throw Error(ErrorCode::kInvalidConfig, "gbm.n_rounds and gbm.learning_rate must be >= 0");
    }
    if (!(m.svm.lambda > 0.0) || m.svm.epochs < 1) {
        throw Error(ErrorCode::kInvalidConfig, "svm.lambda must be > 0 and svm.epochs >= 1");
    }
    if (m.mlp.hidden.empty() || std::count(m.mlp.hidden.begin(), m.mlp.hidden.end(), 0u) > 0 ||
        !(m.mlp.learning_rate > 0.0) || m.mlp.epochs < 0 || m.mlp.batch_size < 1) {
        throw Error(ErrorCode::kInvalidConfig, "mlp needs non-empty hidden widths > 0, learning_rate > 0, batch_size >= 1");
    }
    const auto& a = m.autoencoder;
    if (a.bottleneck < 1 || !(a.learning_rate > 0.0) || a.epochs < 0 || a.batch_size < 1 ||
        !(a.threshold_percentile >= 0.0 && a.threshold_percentile <= 100.0)) {
        throw Error(ErrorCode::kInvalidConfig, "autoencoder parameters out of range");
    }
    if (explanation_top_n == 0) throw Error(ErrorCode::kInvalidConfig, "explanation_top_n must be > 0");
}

EngineConfig parse_config(std::string_view json_text, const std::string& source_name) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kInvalidConfig, source_name + ": " + e.what());
    }
    EngineConfig cfg;
    Section root(doc, source_name);
    int version = kConfigVersion;
    root.read("config_version", version);
    if (version != kConfigVersion) root.fail("unsupported config_version " + std::to_string(version));
    root.read("manifest", cfg.manifest);
    if (auto s = root.child("models")) read_models(*s, cfg.models);
    if (auto s = root.child("weights")) {
        auto& w = cfg.models.weights;
        s->read("tree", w.tree);
        s->read("forest", w.forest);
        s->read("gbm", w.gbm);
        s->read("mlp", w.mlp);
        s->read("svm", w.svm);
        s->finish();
    }
    if (auto s = root.child("verdict")) {
        s->read("caution", cfg.scoring.thresholds.caution);
        s->read("danger", cfg.scoring.thresholds.danger);
        s->read("anomaly_floor", cfg.scoring.anomaly_floor);
        s->read("session_rule_floor", cfg.scoring.session_rule_floor);
        s->finish();
    }
    if (auto s = root.child("session")) {
        s->read("rapid_redirect_ms", cfg.session.rapid_redirect_ms);
        s->read("hidden_redirect_lookback_ms", cfg.session.hidden_redirect_lookback_ms);
        s->finish();
    }
    if (auto s = root.child("features")) {
        s->read("suspicious_tlds", cfg.lexical.suspicious_tlds);
        s->read("young_domain_days", cfg.young_domain_days);
        s->read_path("metadata_fixture", cfg.metadata_fixture);
        s->finish();
    }
    if (auto s = root.child("content")) {
        s->read("sensitive_keywords", cfg.content.sensitive_keywords);
        if (auto o = s->child("obfuscation")) {
            auto& w = cfg.content.obfuscation;
            o->read("eval_flag", w.eval_flag);
            o->read("escape_density", w.escape_density);
            o->read("concat_density", w.concat_density);
            o->read("entropy_flag", w.entropy_flag);
            o->read("entropy_threshold", w.entropy_threshold);
            o->finish();
        }
        s->finish();
    }
    if (auto s = root.child("store")) {
        s->read_path("path", cfg.store.path);
        s->read_path("seed_list", cfg.store.seed_list);
        s->read("ttl_seconds", cfg.store.ttl_seconds);
        s->finish();
    }
    if (auto s = root.child("service")) {
        s->read("explanation_top_n", cfg.explanation_top_n);
        s->finish();
    }
    root.finish();
    cfg.validate();
    return cfg;
}

EngineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIoError, "cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

json config_to_json(const EngineConfig& c) {
    auto opt_path = [](const std::optional<std::filesystem::path>& p) { return p ? json(p->string()) : json(nullptr); };
    const auto& m = c.models;
    return {
        {"config_version", kConfigVersion},
        {"manifest", c.manifest},
        {"models",
         {{"tree", {{"max_depth", m.tree.max_depth}, {"min_samples_leaf", m.tree.min_samples_leaf}}},
          {"forest",
           {{"n_trees", m.forest.n_trees},
            {"bootstrap", m.forest.bootstrap},
            {"max_features", m.forest.max_features},
            {"max_depth", m.forest.tree.max_depth},
            {"min_samples_leaf", m.forest.tree.min_samples_leaf}}},
          {"gbm",
           {{"n_rounds", m.gbm.n_rounds},
            {"learning_rate", m.gbm.learning_rate},
            {"depth", m.gbm.depth},
            {"min_samples_leaf", m.gbm.min_samples_leaf}}},
          {"svm", {{"lambda", m.svm.lambda}, {"epochs", m.svm.epochs}}},
          {"mlp",
           {{"hidden", m.mlp.hidden},
            {"learning_rate", m.mlp.learning_rate},
            {"epochs", m.mlp.epochs},
            {"batch_size", m.mlp.batch_size}}},
          {"autoencoder",
           {{"bottleneck", m.autoencoder.bottleneck},
            {"learning_rate", m.autoencoder.learning_rate},
            {"epochs", m.autoencoder.epochs},
            {"batch_size", m.autoencoder.batch_size},
            {"threshold_percentile", m.autoencoder.threshold_percentile},
            {"hidden_activation", activation_name(m.autoencoder.hidden_activation)},
            {"output_activation", activation_name(m.autoencoder.output_activation)}}},
          {"resample", resample_name(m.resample)},
          {"smote_k", m.smote_k},
          {"seed", m.seed}}},
        {"weights",
         {{"tree", m.weights.tree},
          {"forest", m.weights.forest},
          {"gbm", m.weights.gbm},
          {"mlp", m.weights.mlp},
          {"svm", m.weights.svm}}},
        {"verdict",
         {{"caution", c.scoring.thresholds.caution},
          {"danger", c.scoring.thresholds.danger},
          {"anomaly_floor", c.scoring.anomaly_floor},
          {"session_rule_floor", c.scoring.session_rule_floor}}},
        {"session",
         {{"rapid_redirect_ms", c.session.rapid_redirect_ms},
          {"hidden_redirect_lookback_ms", c.session.hidden_redirect_lookback_ms}}},
        {"features",
         {{"suspicious_tlds", c.lexical.suspicious_tlds},
          {"young_domain_days", c.young_domain_days},
          {"metadata_fixture", opt_path(c.metadata_fixture)}}},
        {"content",
         {{"sensitive_keywords", c.content.sensitive_keywords},
          {"obfuscation",
           {{"eval_flag", c.content.obfuscation.eval_flag},
            {"escape_density", c.content.obfuscation.escape_density},
            {"concat_density", c.content.obfuscation.concat_density},
            {"entropy_flag", c.content.obfuscation.entropy_flag},
            {"entropy_threshold", c.content.obfuscation.entropy_threshold}}}}},
        {"store",
         {{"path", opt_path(c.store.path)}, {"seed_list", opt_path(c.store.seed_list)}, {"ttl_seconds", c.store.ttl_seconds}}},
        {"service", {{"explanation_top_n", c.explanation_top_n}}},
    };
}

EngineConfig resolve_config(const std::optional<std::filesystem::path>& flag_path) {
    if (const char* env = std::getenv("SENTINEL_CONFIG"); env && *env) return load_config(env);
    if (flag_path) return load_config(*flag_path);
    EngineConfig cfg;
    cfg.validate();
    return cfg;
}

}  // namespace sentinel
