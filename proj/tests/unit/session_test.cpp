#include <gtest/gtest.h>

#include "sentinel/error.hpp"
#include "sentinel/session.hpp"

namespace sentinel {
namespace {

SessionEvent ev(EventKind kind, std::int64_t t, std::optional<std::string> host = std::nullopt, bool cross = false) {
    SessionEvent e;
    e.kind = kind;
    e.timestamp_ms = t;
    e.target_host = std::move(host);
    e.cross_origin = cross;
    return e;
}

TEST(SessionTest, RecordAppends) {
    const auto s = record_event(SessionState("s1", "example.com", 0), ev(EventKind::kNavigation, 10));
    EXPECT_EQ(s.events().size(), 1u);
}

TEST(SessionTest, ClampsBackwardTimestamps) {
    SessionState s("s1", "example.com", 0);
    s.record(ev(EventKind::kClick, 100));
    s.record(ev(EventKind::kClick, 40));
    EXPECT_EQ(s.events().back().timestamp_ms, 100);
}

TEST(SessionTest, ClosedSessionRejectsEvents) {
    SessionState s("s1", "example.com", 0);
    s.finalize();
    try {
        s.record(ev(EventKind::kClick, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kSessionClosed);
    }
}

TEST(SessionTest, EmptySession) {
    EXPECT_EQ(session_features(SessionState("s", "example.com", 0)), SessionFeatures{});
}

TEST(SessionTest, RapidCrossOriginChain) {
    SessionState s("s", "example.com", 0);
    s.record(ev(EventKind::kRedirect, 400, "a.other.test"));
    s.record(ev(EventKind::kRedirect, 800, "www.example.com"));
    s.record(ev(EventKind::kRedirect, 1200, "b.third.test"));
    const auto f = session_features(s);
    EXPECT_EQ(f.redirect_chain_length, 3);
    EXPECT_EQ(f.rapid_redirect_count, 3);
    EXPECT_EQ(f.cross_origin_hops, 2);
    EXPECT_TRUE(f.hidden_redirect_flag);
}

TEST(SessionTest, ClickBeforeRedirectIsNotHidden) {
    SessionState s("s", "example.com", 0);
    s.record(ev(EventKind::kClick, 1000));
    s.record(ev(EventKind::kRedirect, 2500, "other.test"));
    auto f = session_features(s);
    EXPECT_FALSE(f.hidden_redirect_flag);
    EXPECT_EQ(f.rapid_redirect_count, 0);

    SessionState late("s", "example.com", 0);
    late.record(ev(EventKind::kClick, 1000));
    late.record(ev(EventKind::kRedirect, 3001, "other.test"));
    EXPECT_TRUE(session_features(late).hidden_redirect_flag);
}

TEST(SessionTest, RapidGapIsStrict) {
    SessionState s("s", "example.com", 0);
    s.record(ev(EventKind::kNavigation, 1000));
    s.record(ev(EventKind::kRedirect, 1500));
    s.record(ev(EventKind::kRedirect, 1999));
    EXPECT_EQ(session_features(s).rapid_redirect_count, 1);
}

TEST(SessionTest, ThirdPartyRatio) {
    SessionState s("s", "example.com", 0);
    for (int i = 0; i < 6; ++i) s.record(ev(EventKind::kRequest, i, "static.example.com"));
    s.record(ev(EventKind::kRequest, 6, "ads.one.test"));
    s.record(ev(EventKind::kRequest, 7, "cdn.one.test"));
    s.record(ev(EventKind::kRequest, 8, "two.test"));
    s.record(ev(EventKind::kRequest, 9, std::nullopt, true));
    const auto f = session_features(s);
    EXPECT_DOUBLE_EQ(f.third_party_request_ratio, 0.4);
    EXPECT_EQ(f.unique_third_party_domains, 2);
}

TEST(SessionTest, FormSubmitAndFocus) {
    SessionState s("s", "example.com", 0);
    auto submit = ev(EventKind::kFormSubmit, 5, "collect.evil.test");
    submit.field_counts = {{"text", 2}, {"password", 1}};
    s.record(submit);
    s.record(ev(EventKind::kFocusSensitiveField, 6));
    s.record(ev(EventKind::kFocusSensitiveField, 7));
    s.record(ev(EventKind::kHover, 8));
    const auto f = session_features(s);
    EXPECT_TRUE(f.external_form_submit);
    EXPECT_TRUE(f.external_sensitive_submit);
    EXPECT_EQ(f.sensitive_field_focus_count, 2);

    SessionState plain("s", "example.com", 0);
    auto local = ev(EventKind::kFormSubmit, 5, "example.com");
    local.field_counts = {{"password", 1}};
    plain.record(local);
    EXPECT_FALSE(session_features(plain).external_form_submit);
    EXPECT_FALSE(session_features(plain).external_sensitive_submit);
}

TEST(SessionTest, EventKindNames) {
    for (auto k : {EventKind::kNavigation, EventKind::kRedirect, EventKind::kRequest, EventKind::kFormSubmit,
                   EventKind::kFocusSensitiveField, EventKind::kClick, EventKind::kHover}) {
        EXPECT_EQ(parse_event_kind(event_kind_name(k)), k);
    }
    EXPECT_FALSE(parse_event_kind("scroll").has_value());
    EXPECT_TRUE(is_sensitive_field_type("password"));
    EXPECT_FALSE(is_sensitive_field_type("text"));
}

}  // namespace
}  // namespace sentinel
