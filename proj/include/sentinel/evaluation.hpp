#pragma once

#include <cstddef>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "sentinel/dataset.hpp"
#include "sentinel/models/ensemble.hpp"
#include "sentinel/scoring.hpp"

namespace sentinel {

// Score at or above which eval counts a row as predicted fraud. Independent
// of the verdict tiers.
inline constexpr double kFraudDecisionScore = 50.0;

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    double accuracy() const;
    double precision() const;
    double recall() const;
    double f1() const;

    void add(int label, bool predicted_fraud);
    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix evaluate(const Ensemble& e, const LabeledDataset& ds, double anomaly_floor = 75.0,
                         double decision_score = kFraudDecisionScore);

std::string format_eval_table(const ConfusionMatrix& m);
nlohmann::json eval_to_json(const ConfusionMatrix& m);

}  // namespace sentinel
