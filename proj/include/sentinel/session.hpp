#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sentinel {

enum class EventKind { kNavigation, kRedirect, kRequest, kFormSubmit, kFocusSensitiveField, kClick, kHover };

std::string_view event_kind_name(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

struct SessionEvent {
    EventKind kind = EventKind::kNavigation;
    std::int64_t timestamp_ms = 0;
    std::optional<std::string> target_host;
    bool cross_origin = false;
    std::set<std::string> metadata_flags;
    // form_submit only: input type -> count. Field values are never carried.
    std::map<std::string, int> field_counts;

    bool operator==(const SessionEvent&) const = default;
};

struct SessionThresholds {
    std::int64_t rapid_redirect_ms = 500;
    std::int64_t hidden_redirect_lookback_ms = 2000;
};

class SessionState {
public:
    SessionState(std::string session_id, std::string page_host, std::int64_t created_at_ms);

    const std::string& session_id() const { return session_id_; }
    const std::string& page_host() const { return page_host_; }
    std::int64_t created_at_ms() const { return created_at_ms_; }
    const std::vector<SessionEvent>& events() const { return events_; }
    bool closed() const { return closed_; }

    // Appends the event, clamping its timestamp up to the last recorded one.
    // Throws Error{kSessionClosed} after finalize().
    void record(SessionEvent event);
    void finalize() { closed_ = true; }

private:
    std::string session_id_;
    std::string page_host_;
    std::int64_t created_at_ms_;
    std::vector<SessionEvent> events_;
    bool closed_ = false;
};

// Value-returning form of SessionState::record.
SessionState record_event(SessionState state, SessionEvent event);

struct SessionFeatures {
    int redirect_chain_length = 0;
    int cross_origin_hops = 0;
    int rapid_redirect_count = 0;
    double third_party_request_ratio = 0.0;
    int unique_third_party_domains = 0;
    bool external_form_submit = false;
    // A cross-origin submit that carried password or other sensitive inputs.
    bool external_sensitive_submit = false;
    int sensitive_field_focus_count = 0;
    bool hidden_redirect_flag = false;

    bool operator==(const SessionFeatures&) const = default;
};

// Redirect gaps are measured from the previous redirect, or for the first one
// from the latest navigation (session creation if none).
SessionFeatures session_features(const SessionState& state, const SessionThresholds& thresholds = {});

// Input types counted as sensitive in form_submit field counts.
bool is_sensitive_field_type(std::string_view type);

}  // namespace sentinel
