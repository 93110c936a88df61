#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "sentinel/config.hpp"
#include "sentinel/features.hpp"
#include "sentinel/models/ensemble.hpp"
#include "sentinel/reputation.hpp"
#include "sentinel/scoring.hpp"
#include "sentinel/session.hpp"

namespace httplib {
class Server;
}

namespace sentinel {

struct HttpResponse {
    int status = 200;
    nlohmann::json body;
};

// Epoch milliseconds.
using Clock = std::function<std::int64_t()>;
Clock system_clock_ms();

// Decodes one session event wire record. Throws Error{kSchemaError} on
// unknown keys, bad types, or any attempt to carry field values.
SessionEvent decode_session_event(const nlohmann::json& record);
nlohmann::json encode_session_event(const SessionEvent& event);

// The /api/v1 backend: reputation lookup first, ML scoring on a miss,
// session rescoring as events arrive.
class Service {
public:
    Service(EngineConfig config, ReputationStore store, std::shared_ptr<const MetadataProvider> provider,
            Clock clock = system_clock_ms());

    void load_bundle(Ensemble bundle);
    bool ready() const;

    HttpResponse handle_analyze(const std::string& body, bool force = false);
    HttpResponse handle_session_event(const std::string& session_id, const std::string& body);
    HttpResponse handle_score_get(const std::string& session_id) const;
    HttpResponse handle_health() const;
    HttpResponse handle_models_info() const;

    // Number of ensemble evaluations performed (analyze misses and rescoring).
    std::uint64_t model_evaluations() const { return evaluations_.load(); }

    ReputationStore& store() { return store_; }
    const EngineConfig& config() const { return config_; }

    void register_routes(httplib::Server& server);

private:
    struct SessionRecord {
        std::mutex mutex;
        SessionState state;
        FeatureVector base_features;
        RiskAssessment assessment;
        std::string canonical_url;
        std::set<std::pair<int, std::int64_t>> seen;  // (kind, timestamp) dedup keys

        SessionRecord(SessionState s, FeatureVector f, RiskAssessment a, std::string url)
            : state(std::move(s)), base_features(std::move(f)), assessment(std::move(a)), canonical_url(std::move(url)) {}
    };

    std::shared_ptr<const Ensemble> bundle() const;
    FeatureVector extract(const UrlParts& parts, const std::string& raw, const std::optional<std::string>& html) const;
    nlohmann::json assessment_json(const RiskAssessment& a) const;

    EngineConfig config_;
    ReputationStore store_;
    std::shared_ptr<const MetadataProvider> provider_;
    Clock clock_;

    mutable std::mutex bundle_mutex_;
    std::shared_ptr<const Ensemble> bundle_;

    // Assessments behind cached verdicts, so hits can return their explanation.
    mutable std::shared_mutex assessments_mutex_;
    std::unordered_map<std::string, RiskAssessment> assessments_;

    mutable std::shared_mutex sessions_mutex_;
    std::unordered_map<std::string, std::shared_ptr<SessionRecord>> sessions_;

    std::atomic<std::uint64_t> evaluations_{0};
};

}  // namespace sentinel
