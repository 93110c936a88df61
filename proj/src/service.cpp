#include "sentinel/service.hpp"

#include <algorithm>
#include <chrono>
#include <regex>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "sentinel/content.hpp"
#include "sentinel/error.hpp"
#include "sentinel/manifest.hpp"
#include "sentinel/url.hpp"

namespace sentinel {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 18> kFieldTypes{"text",   "password", "email",  "tel",   "number", "hidden",
                                                       "checkbox", "radio",  "select", "textarea", "file", "date",
                                                       "search", "url",     "ssn",    "card",  "cvv",    "other"};

HttpResponse error_response(int status, std::string_view code, const std::string& message) {
    return {status, json{{"error_code", code}, {"message", message}}};
}

HttpResponse schema_violation(const std::string& message) { return error_response(422, "schema_violation", message); }

bool is_token(std::string_view s, std::size_t max_len, bool allow_upper) {
    if (s.empty() || s.size() > max_len) return false;
    return std::all_of(s.begin(), s.end(), [allow_upper](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
               (allow_upper && c >= 'A' && c <= 'Z');
    });
}

bool is_hostname(std::string_view s) {
    if (s.empty() || s.size() > 253) return false;
    if (s.front() == '[') return s.back() == ']';
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '_';
    });
}

void require_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view what) {
    if (!j.is_object()) throw Error(ErrorCode::kSchemaError, std::string(what) + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw Error(ErrorCode::kSchemaError, std::string(what) + " has unknown field '" + key + "'");
        }
    }
}

json outputs_json(const ModelOutputs& o) {
    return {{"tree", o.tree},         {"forest", o.forest},
            {"gbm", o.gbm},           {"mlp", o.mlp},
            {"svm", o.svm},           {"anomaly_score", o.anomaly_score},
            {"anomaly_flag", o.anomaly_flag}};
}

}  // namespace

Clock system_clock_ms() {
    return [] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
            .count();
    };
}

SessionEvent decode_session_event(const json& record) {
    require_keys(record, {"kind", "timestamp_ms", "target_host", "cross_origin", "flags", "field_counts"}, "event");
    SessionEvent e;
    if (!record.contains("kind") || !record["kind"].is_string()) {
        throw Error(ErrorCode::kSchemaError, "event.kind must be a string");
    }
    const auto kind = parse_event_kind(record["kind"].get<std::string>());
    if (!kind) throw Error(ErrorCode::kSchemaError, "unknown event kind '" + record["kind"].get<std::string>() + "'");
    e.kind = *kind;
    if (!record.contains("timestamp_ms") || !record["timestamp_ms"].is_number_integer()) {
        throw Error(ErrorCode::kSchemaError, "event.timestamp_ms must be an integer");
    }
    e.timestamp_ms = record["timestamp_ms"].get<std::int64_t>();

    if (record.contains("target_host") && !record["target_host"].is_null()) {
        if (!record["target_host"].is_string()) throw Error(ErrorCode::kSchemaError, "event.target_host must be a string");
        std::string host = record["target_host"].get<std::string>();
        std::transform(host.begin(), host.end(), host.begin(), [](unsigned char c) { return std::tolower(c); });
        if (!is_hostname(host)) throw Error(ErrorCode::kSchemaError, "event.target_host is not a hostname");
        e.target_host = std::move(host);
    }
    if (record.contains("cross_origin")) {
        if (!record["cross_origin"].is_boolean()) throw Error(ErrorCode::kSchemaError, "event.cross_origin must be a bool");
        e.cross_origin = record["cross_origin"].get<bool>();
    }
    if (record.contains("flags")) {
        if (!record["flags"].is_array()) throw Error(ErrorCode::kSchemaError, "event.flags must be an array");
        for (const auto& f : record["flags"]) {
            if (!f.is_string() || !is_token(f.get<std::string>(), 32, false)) {
                throw Error(ErrorCode::kSchemaError, "event.flags entries must be short lowercase tokens");
            }
            e.metadata_flags.insert(f.get<std::string>());
        }
    }
    if (record.contains("field_counts")) {
        if (e.kind != EventKind::kFormSubmit) {
            throw Error(ErrorCode::kSchemaError, "field_counts is only valid on form_submit events");
        }
        const auto& counts = record["field_counts"];
        if (!counts.is_object()) throw Error(ErrorCode::kSchemaError, "event.field_counts must be an object");
        for (const auto& [type, n] : counts.items()) {
            if (std::find(kFieldTypes.begin(), kFieldTypes.end(), type) == kFieldTypes.end()) {
                throw Error(ErrorCode::kSchemaError, "unknown field type '" + type + "'");
            }
            if (!n.is_number_integer() || n.get<std::int64_t>() < 0 || n.get<std::int64_t>() > 10000) {
                throw Error(ErrorCode::kSchemaError, "field_counts values must be non-negative integers");
            }
            e.field_counts[type] = n.get<int>();
        }
    }
    return e;
}

json encode_session_event(const SessionEvent& e) {
    json j{{"kind", event_kind_name(e.kind)}, {"timestamp_ms", e.timestamp_ms}, {"cross_origin", e.cross_origin}};
    if (e.target_host) j["target_host"] = *e.target_host;
    if (!e.metadata_flags.empty()) j["flags"] = e.metadata_flags;
    if (!e.field_counts.empty()) j["field_counts"] = e.field_counts;
    return j;
}

Service::Service(EngineConfig config, ReputationStore store, std::shared_ptr<const MetadataProvider> provider, Clock clock)
    : config_(std::move(config)), store_(std::move(store)), provider_(std::move(provider)), clock_(std::move(clock)) {
    config_.validate();
    if (!provider_) provider_ = std::make_shared<FixtureMetadataProvider>();
}

void Service::load_bundle(Ensemble bundle) {
    if (bundle.manifest != default_manifest()) {
        throw Error(ErrorCode::kSchemaError, "bundle manifest does not match the feature layout");
    }
    auto shared = std::make_shared<const Ensemble>(std::move(bundle));
    std::lock_guard lock(bundle_mutex_);
    bundle_ = std::move(shared);
}

std::shared_ptr<const Ensemble> Service::bundle() const {
    std::lock_guard lock(bundle_mutex_);
    return bundle_;
}

bool Service::ready() const { return bundle() != nullptr; }

FeatureVector Service::extract(const UrlParts& parts, const std::string& raw, const std::optional<std::string>& html) const {
    const auto lexical = lexical_features(parts, raw, config_.lexical);
    const auto today = Date{std::chrono::floor<std::chrono::days>(
        std::chrono::sys_time<std::chrono::milliseconds>(std::chrono::milliseconds(clock_())))};
    const auto domain = domain_metadata(parts.host, *provider_, today, config_.young_domain_days);
    std::optional<ContentFeatures> content;
    if (html) content = analyze_html(*html, parts.host, config_.content);
    return assemble_features(lexical, domain, content);
}

json Service::assessment_json(const RiskAssessment& a) const {
    json explanation = json::array();
    const auto n = std::min(config_.explanation_top_n, a.explanation.size());
    for (std::size_t i = 0; i < n; ++i) {
        explanation.push_back({{"feature", a.explanation[i].feature}, {"delta", a.explanation[i].delta}});
    }
    return {{"score", a.score},
            {"verdict", verdict_name(a.verdict)},
            {"alert", a.verdict == Verdict::kDanger},
            {"cached", a.cached},
            {"explanation", std::move(explanation)},
            {"model_outputs", outputs_json(a.model_outputs)},
            {"assessed_at", a.assessed_at}};
}

HttpResponse Service::handle_analyze(const std::string& body, bool force) {
    json req;
    std::string url;
    std::optional<std::string> html;
    std::optional<std::string> session_id;
    try {
        req = json::parse(body);
        require_keys(req, {"url", "html", "session_id", "force"}, "analyze request");
        if (!req.contains("url") || !req["url"].is_string()) return schema_violation("url must be a string");
        url = req["url"].get<std::string>();
        if (req.contains("html") && !req["html"].is_null()) {
            if (!req["html"].is_string()) return schema_violation("html must be a string");
            html = req["html"].get<std::string>();
        }
        if (req.contains("session_id") && !req["session_id"].is_null()) {
            if (!req["session_id"].is_string() || !is_token(req["session_id"].get<std::string>(), 128, true)) {
                return schema_violation("session_id must be 1-128 characters of [A-Za-z0-9_-]");
            }
            session_id = req["session_id"].get<std::string>();
        }
        if (req.contains("force")) {
            if (!req["force"].is_boolean()) return schema_violation("force must be a bool");
            force = force || req["force"].get<bool>();
        }
    } catch (const json::exception& e) {
        return schema_violation(std::string("request body is not valid JSON: ") + e.what());
    } catch (const Error& e) {
        return schema_violation(e.what());
    }

    UrlParts parts;
    std::string canonical;
    try {
        parts = parse_url(url);
        canonical = canonicalize(url);
    } catch (const Error& e) {
        return error_response(400, e.code_name(), e.what());
    }

    const std::int64_t now_ms = clock_();
    const std::int64_t now = now_ms / 1000;
    RiskAssessment assessment;
    std::optional<FeatureVector> features;

    const auto hit = force ? std::nullopt : store_.lookup(canonical, now);
    bool have_outputs = true;
    if (hit) {
        assessment.score = hit->score;
        assessment.verdict = hit->verdict;
        assessment.assessed_at = hit->stored_at;
        {
            std::shared_lock lock(assessments_mutex_);
            const auto it = assessments_.find(canonical);
            have_outputs = it != assessments_.end() && it->second.score == hit->score;
            if (have_outputs) {
                assessment.explanation = it->second.explanation;
                assessment.model_outputs = it->second.model_outputs;
            }
        }
        assessment.cached = true;
    } else {
        const auto model = bundle();
        if (!model) return error_response(503, "model_unavailable", "no model bundle is loaded");
        features = extract(parts, url, html);
        assessment = assess(*model, *features, config_.scoring, now);
        ++evaluations_;
        store_.upsert(canonical, assessment.score, assessment.verdict, EntrySource::kMlPipeline, now,
                      config_.store.ttl_seconds);
        std::unique_lock lock(assessments_mutex_);
        assessments_.insert_or_assign(canonical, assessment);
    }

    json out = assessment_json(assessment);
    out["url"] = canonical;
    if (!have_outputs) out["model_outputs"] = nullptr;
    if (session_id) {
        if (!features) features = extract(parts, url, html);
        auto record = std::make_shared<SessionRecord>(SessionState(*session_id, parts.host, now_ms), *features,
                                                      assessment, canonical);
        std::unique_lock lock(sessions_mutex_);
        sessions_.insert_or_assign(*session_id, std::move(record));
        out["session_id"] = *session_id;
    }
    return {200, std::move(out)};
}

HttpResponse Service::handle_session_event(const std::string& session_id, const std::string& body) {
    std::shared_ptr<SessionRecord> record;
    {
        std::shared_lock lock(sessions_mutex_);
        const auto it = sessions_.find(session_id);
        if (it == sessions_.end()) return error_response(404, "unknown_session", "no session '" + session_id + "'");
        record = it->second;
    }

    SessionEvent event;
    try {
        event = decode_session_event(json::parse(body));
    } catch (const json::exception& e) {
        return schema_violation(std::string("event body is not valid JSON: ") + e.what());
    } catch (const Error& e) {
        return schema_violation(e.what());
    }

    const auto model = bundle();
    if (!model) return error_response(503, "model_unavailable", "no model bundle is loaded");

    std::lock_guard lock(record->mutex);
    const auto key = std::make_pair(static_cast<int>(event.kind), event.timestamp_ms);
    bool duplicate = !record->seen.insert(key).second;
    if (!duplicate) {
        try {
            record->state.record(event);
        } catch (const Error& e) {
            return error_response(409, e.code_name(), e.what());
        }
        const auto features = session_features(record->state, config_.session);
        const auto previous = record->assessment.verdict;
        record->assessment = rescore_with_session(record->assessment, record->base_features, features, *model,
                                                  config_.scoring, clock_() / 1000);
        ++evaluations_;
        if (record->assessment.verdict > previous) {
            store_.upsert(record->canonical_url, record->assessment.score, record->assessment.verdict,
                          EntrySource::kMlPipeline, clock_() / 1000, config_.store.ttl_seconds);
            std::unique_lock alock(assessments_mutex_);
            assessments_.insert_or_assign(record->canonical_url, record->assessment);
        }
    }
    json out = assessment_json(record->assessment);
    out["session_id"] = session_id;
    out["duplicate"] = duplicate;
    out["events_recorded"] = record->state.events().size();
    return {200, std::move(out)};
}

HttpResponse Service::handle_score_get(const std::string& session_id) const {
    std::shared_ptr<SessionRecord> record;
    {
        std::shared_lock lock(sessions_mutex_);
        const auto it = sessions_.find(session_id);
        if (it == sessions_.end()) return error_response(404, "unknown_session", "no session '" + session_id + "'");
        record = it->second;
    }
    std::lock_guard lock(record->mutex);
    json out = assessment_json(record->assessment);
    out["session_id"] = session_id;
    out["events_recorded"] = record->state.events().size();
    return {200, std::move(out)};
}

HttpResponse Service::handle_health() const {
    std::size_t sessions = 0;
    {
        std::shared_lock lock(sessions_mutex_);
        sessions = sessions_.size();
    }
    const bool loaded = ready();
    return {200, json{{"status", loaded ? "ok" : "degraded"},
                      {"bundle_loaded", loaded},
                      {"store_entries", store_.size()},
                      {"sessions", sessions}}};
}

HttpResponse Service::handle_models_info() const {
    const auto model = bundle();
    if (!model) return error_response(503, "model_unavailable", "no model bundle is loaded");
    return {200, json{{"format_version", model->format_version},
                      {"manifest_size", model->manifest.size()},
                      {"manifest", model->manifest},
                      {"training_seed", model->training_seed},
                      {"forest_trees", model->forest.trees.size()},
                      {"gbm_stages", model->gbm.stages.size()},
                      {"anomaly_threshold", model->autoencoder.anomaly_threshold}}};
}

void Service::register_routes(httplib::Server& server) {
    auto send = [](httplib::Response& res, const HttpResponse& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    server.Post("/api/v1/analyze", [this, send](const httplib::Request& req, httplib::Response& res) {
        const bool force = req.has_param("force") && req.get_param_value("force") == "true";
        send(res, handle_analyze(req.body, force));
    });
    server.Post(R"(/api/v1/sessions/([A-Za-z0-9_-]+)/events)",
                [this, send](const httplib::Request& req, httplib::Response& res) {
                    send(res, handle_session_event(req.matches[1], req.body));
                });
    server.Get(R"(/api/v1/sessions/([A-Za-z0-9_-]+)/score)",
               [this, send](const httplib::Request& req, httplib::Response& res) {
                   send(res, handle_score_get(req.matches[1]));
               });
    server.Get("/api/v1/health", [this, send](const httplib::Request&, httplib::Response& res) { send(res, handle_health()); });
    server.Get("/api/v1/models/info",
               [this, send](const httplib::Request&, httplib::Response& res) { send(res, handle_models_info()); });
    server.set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        spdlog::error("request failed: {}", what);
        send(res, error_response(500, "internal_error", what));
    });
}

}  // namespace sentinel
