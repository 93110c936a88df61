#include "sentinel/session.hpp"

#include <algorithm>
#include <array>

#include "sentinel/error.hpp"
#include "sentinel/url.hpp"

namespace sentinel {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 7> kKindNames{{
    {EventKind::kNavigation, "navigation"},
    {EventKind::kRedirect, "redirect"},
    {EventKind::kRequest, "request"},
    {EventKind::kFormSubmit, "form_submit"},
    {EventKind::kFocusSensitiveField, "focus_sensitive_field"},
    {EventKind::kClick, "click"},
    {EventKind::kHover, "hover"},
}};

}  // namespace

std::string_view event_kind_name(EventKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

bool is_sensitive_field_type(std::string_view type) {
    return type == "password" || type == "ssn" || type == "card" || type == "cvv";
}

SessionState::SessionState(std::string session_id, std::string page_host, std::int64_t created_at_ms)
    : session_id_(std::move(session_id)), page_host_(std::move(page_host)), created_at_ms_(created_at_ms) {}

void SessionState::record(SessionEvent event) {
    if (closed_) throw Error(ErrorCode::kSessionClosed, "session " + session_id_ + " is finalized");
    if (!events_.empty() && event.timestamp_ms < events_.back().timestamp_ms) {
        event.timestamp_ms = events_.back().timestamp_ms;
    }
    events_.push_back(std::move(event));
}

SessionState record_event(SessionState state, SessionEvent event) {
    state.record(std::move(event));
    return state;
}

SessionFeatures session_features(const SessionState& state, const SessionThresholds& thresholds) {
    SessionFeatures f;
    const std::string page_domain = registrable_domain(state.page_host());

    std::int64_t chain_anchor = state.created_at_ms();
    std::optional<std::int64_t> last_click;
    int requests = 0;
    int third_party = 0;
    std::set<std::string> third_party_domains;

    for (const auto& e : state.events()) {
        switch (e.kind) {
            case EventKind::kNavigation:
                chain_anchor = e.timestamp_ms;
                break;
            case EventKind::kClick:
                last_click = e.timestamp_ms;
                break;
            case EventKind::kRedirect:
                ++f.redirect_chain_length;
                if (e.cross_origin || (e.target_host && registrable_domain(*e.target_host) != page_domain)) {
                    ++f.cross_origin_hops;
                }
                if (e.timestamp_ms - chain_anchor < thresholds.rapid_redirect_ms) ++f.rapid_redirect_count;
                if (!last_click || e.timestamp_ms - *last_click > thresholds.hidden_redirect_lookback_ms) {
                    f.hidden_redirect_flag = true;
                }
                chain_anchor = e.timestamp_ms;
                break;
            case EventKind::kRequest: {
                ++requests;
                bool external = e.cross_origin;
                std::string domain;
                if (e.target_host) {
                    domain = registrable_domain(*e.target_host);
                    external = domain != page_domain;
                }
                if (external) {
                    ++third_party;
                    if (!domain.empty()) third_party_domains.insert(domain);
                }
                break;
            }
            case EventKind::kFormSubmit: {
                bool external = e.cross_origin;
                if (e.target_host) external = registrable_domain(*e.target_host) != page_domain;
                if (external) {
                    f.external_form_submit = true;
                    const bool sensitive = std::any_of(e.field_counts.begin(), e.field_counts.end(), [](const auto& kv) {
                        return kv.second > 0 && is_sensitive_field_type(kv.first);
                    });
                    if (sensitive) f.external_sensitive_submit = true;
                }
                break;
            }
            case EventKind::kFocusSensitiveField:
                ++f.sensitive_field_focus_count;
                break;
            case EventKind::kHover:
                break;
        }
    }
    if (requests > 0) f.third_party_request_ratio = static_cast<double>(third_party) / requests;
    f.unique_third_party_domains = static_cast<int>(third_party_domains.size());
    return f;
}

}  // namespace sentinel
