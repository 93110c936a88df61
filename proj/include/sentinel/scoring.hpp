#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sentinel/manifest.hpp"
#include "sentinel/models/ensemble.hpp"
#include "sentinel/session.hpp"
#include "sentinel/verdict.hpp"

namespace sentinel {

struct VerdictThresholds {
    double caution = 30.0;
    double danger = 70.0;

    // Throws Error{kInvalidConfig} unless 0 <= caution < danger <= 100.
    void validate() const;
};

struct ScoringConfig {
    VerdictThresholds thresholds;
    // Minimum score when the autoencoder flags the page as anomalous.
    double anomaly_floor = 75.0;
    // Minimum score after a hidden redirect or a cross-origin sensitive submit.
    double session_rule_floor = 70.0;
};

// 100 * sum(w_i * p_i), raised to anomaly_floor when the anomaly flag is set.
double aggregate_score(const ModelOutputs& outputs, const AggregationWeights& weights, double anomaly_floor = 75.0);

// Lower bounds are inclusive for the higher tier.
Verdict assign_verdict(double score, const VerdictThresholds& thresholds = {});

struct Contribution {
    std::string feature;
    double delta = 0.0;

    bool operator==(const Contribution&) const = default;
};

// delta_i = score(x) - score(x with feature i set to its training median),
// sorted by |delta| descending (feature order among equals).
std::vector<Contribution> explain(const Ensemble& e, const FeatureVector& x, double anomaly_floor = 75.0);

struct RiskAssessment {
    double score = 0.0;
    Verdict verdict = Verdict::kSafe;
    ModelOutputs model_outputs;
    std::vector<Contribution> explanation;
    bool cached = false;
    std::int64_t assessed_at = 0;  // epoch seconds
};

RiskAssessment assess(const Ensemble& e, const FeatureVector& x, const ScoringConfig& config, std::int64_t now);

// Session slots of `base_features` are overwritten, the ensemble rescored,
// rule floors applied, and the result ratcheted against prev.score.
RiskAssessment rescore_with_session(const RiskAssessment& prev, const FeatureVector& base_features,
                                    const SessionFeatures& session, const Ensemble& e, const ScoringConfig& config,
                                    std::int64_t now);

}  // namespace sentinel
