#include "sentinel/scoring.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "sentinel/error.hpp"

namespace sentinel {

namespace {

constexpr std::array<std::pair<Verdict, std::string_view>, 3> kVerdictNames{{
    {Verdict::kSafe, "safe"},
    {Verdict::kCaution, "caution"},
    {Verdict::kDanger, "danger"},
}};

}  // namespace

std::string_view verdict_name(Verdict v) {
    for (const auto& [k, name] : kVerdictNames) {
        if (k == v) return name;
    }
    return "safe";
}

std::optional<Verdict> parse_verdict(std::string_view name) {
    for (const auto& [k, n] : kVerdictNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

void VerdictThresholds::validate() const {
    if (!(caution >= 0.0 && caution < danger && danger <= 100.0)) {
        throw Error(ErrorCode::kInvalidConfig, "verdict thresholds need 0 <= caution < danger <= 100");
    }
}

double aggregate_score(const ModelOutputs& outputs, const AggregationWeights& weights, double anomaly_floor) {
    weights.validate();
    const auto w = weights.as_array();
    const auto p = outputs.probabilities();
    double score = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) score += w[i] * p[i];
    score = std::clamp(100.0 * score, 0.0, 100.0);
    if (outputs.anomaly_flag) score = std::max(score, anomaly_floor);
    return score;
}

Verdict assign_verdict(double score, const VerdictThresholds& thresholds) {
    thresholds.validate();
    if (score >= thresholds.danger) return Verdict::kDanger;
    if (score >= thresholds.caution) return Verdict::kCaution;
    return Verdict::kSafe;
}

std::vector<Contribution> explain(const Ensemble& e, const FeatureVector& x, double anomaly_floor) {
    if (x.size() != e.dim() || e.medians.size() != e.dim()) {
        throw Error(ErrorCode::kDimensionMismatch, "explain: vector width does not match the bundle manifest");
    }
    const double base = aggregate_score(ensemble_predict(e, x), e.weights, anomaly_floor);
    std::vector<Contribution> out;
    out.reserve(x.size());
    FeatureVector probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        probe[i] = e.medians[i];
        out.push_back({e.manifest[i], base - aggregate_score(ensemble_predict(e, probe), e.weights, anomaly_floor)});
        probe[i] = x[i];
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Contribution& a, const Contribution& b) { return std::abs(a.delta) > std::abs(b.delta); });
    return out;
}

RiskAssessment assess(const Ensemble& e, const FeatureVector& x, const ScoringConfig& config, std::int64_t now) {
    RiskAssessment a;
    a.model_outputs = ensemble_predict(e, x);
    a.score = aggregate_score(a.model_outputs, e.weights, config.anomaly_floor);
    a.verdict = assign_verdict(a.score, config.thresholds);
    a.explanation = explain(e, x, config.anomaly_floor);
    a.assessed_at = now;
    return a;
}

RiskAssessment rescore_with_session(const RiskAssessment& prev, const FeatureVector& base_features,
                                    const SessionFeatures& session, const Ensemble& e, const ScoringConfig& config,
                                    std::int64_t now) {
    if (base_features.size() != e.dim() || base_features.size() != kFeatureCount) {
        throw Error(ErrorCode::kDimensionMismatch, "rescore: base vector width does not match the manifest");
    }
    FeatureVector x = base_features;
    apply_session_features(x, session);

    RiskAssessment next = assess(e, x, config, now);
    if (session.hidden_redirect_flag || session.external_sensitive_submit) {
        next.score = std::max(next.score, config.session_rule_floor);
    }
    next.score = std::max(next.score, prev.score);
    next.verdict = assign_verdict(next.score, config.thresholds);
    return next;
}

}  // namespace sentinel
