#include "sentinel/evaluation.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

#include "sentinel/error.hpp"

namespace sentinel {

namespace {

double ratio(std::size_t num, std::size_t den) { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }

}  // namespace

double ConfusionMatrix::accuracy() const { return ratio(tp + tn, total()); }
double ConfusionMatrix::precision() const { return ratio(tp, tp + fp); }
double ConfusionMatrix::recall() const { return ratio(tp, tp + fn); }

double ConfusionMatrix::f1() const {
    const double p = precision();
    const double r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

void ConfusionMatrix::add(int label, bool predicted_fraud) {
    if (label == 1) {
        ++(predicted_fraud ? tp : fn);
    } else {
        ++(predicted_fraud ? fp : tn);
    }
}

ConfusionMatrix evaluate(const Ensemble& e, const LabeledDataset& ds, double anomaly_floor, double decision_score) {
    if (ds.feature_names != e.manifest) {
        throw Error(ErrorCode::kSchemaError, "dataset columns do not match the bundle manifest");
    }
    std::vector<FeatureVector> rows;
    rows.reserve(ds.size());
    for (const auto& r : ds.rows) rows.push_back(r.x);
    const auto outputs = predict_batch(e, rows, kernels::Exec::kParallel);
    ConfusionMatrix m;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        m.add(ds.rows[i].label, aggregate_score(outputs[i], e.weights, anomaly_floor) >= decision_score);
    }
    return m;
}

std::string format_eval_table(const ConfusionMatrix& m) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "metric      value\n"
                  "accuracy    %.4f\n"
                  "precision   %.4f\n"
                  "recall      %.4f\n"
                  "f1          %.4f\n"
                  "\n"
                  "confusion   pred_fraud  pred_legit\n"
                  "fraud       %10zu  %10zu\n"
                  "legit       %10zu  %10zu\n",
                  m.accuracy(), m.precision(), m.recall(), m.f1(), m.tp, m.fn, m.fp, m.tn);
    return buf;
}

nlohmann::json eval_to_json(const ConfusionMatrix& m) {
    return {{"accuracy", m.accuracy()},
            {"precision", m.precision()},
            {"recall", m.recall()},
            {"f1", m.f1()},
            {"decision_score", kFraudDecisionScore},
            {"confusion", {{"tp", m.tp}, {"fp", m.fp}, {"tn", m.tn}, {"fn", m.fn}}}};
}

}  // namespace sentinel
