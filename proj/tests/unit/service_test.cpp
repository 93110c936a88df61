#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "sentinel/error.hpp"
#include "sentinel/service.hpp"
#include "test_fixtures.hpp"

namespace sentinel {
namespace {

using nlohmann::json;

struct FakeClock {
    std::shared_ptr<std::atomic<std::int64_t>> ms = std::make_shared<std::atomic<std::int64_t>>(testing::kFixedNowMs);
    Clock fn() const {
        return [ms = ms] { return ms->load(); };
    }
};

std::unique_ptr<Service> make_service(const FakeClock& clock, bool with_bundle = true, ReputationStore store = ReputationStore()) {
    auto provider =
        std::make_shared<FixtureMetadataProvider>(FixtureMetadataProvider::load(testing::fixture("metadata.json")));
    auto svc = std::make_unique<Service>(EngineConfig{}, std::move(store), provider, clock.fn());
    if (with_bundle) svc->load_bundle(testing::golden_bundle());
    return svc;
}

std::string analyze_body(const std::string& url, const std::optional<std::string>& session = std::nullopt) {
    json j{{"url", url}};
    if (session) j["session_id"] = *session;
    return j.dump();
}

std::string event(const std::string& kind, std::int64_t ts, json extra = json::object()) {
    extra["kind"] = kind;
    extra["timestamp_ms"] = ts;
    return extra.dump();
}

TEST(ServiceTest, MissThenCachedHit) {
    FakeClock clock;
    auto svc = make_service(clock);
    const auto first = svc->handle_analyze(analyze_body("https://www.example.com/"));
    ASSERT_EQ(first.status, 200) << first.body.dump();
    EXPECT_FALSE(first.body["cached"].get<bool>());
    EXPECT_EQ(svc->model_evaluations(), 1u);

    const auto second = svc->handle_analyze(analyze_body("HTTPS://WWW.EXAMPLE.COM:443/#frag"));
    ASSERT_EQ(second.status, 200);
    EXPECT_TRUE(second.body["cached"].get<bool>());
    EXPECT_EQ(second.body["score"], first.body["score"]);
    EXPECT_EQ(second.body["explanation"], first.body["explanation"]);
    EXPECT_EQ(svc->model_evaluations(), 1u);

    const auto forced = svc->handle_analyze(analyze_body("https://www.example.com/"), true);
    EXPECT_FALSE(forced.body["cached"].get<bool>());
    EXPECT_EQ(svc->model_evaluations(), 2u);
}

TEST(ServiceTest, CachedLookupIsFast) {
    FakeClock clock;
    auto svc = make_service(clock);
    ASSERT_EQ(svc->handle_analyze(analyze_body("https://www.example.com/a")).status, 200);
    const auto start = std::chrono::steady_clock::now();
    const auto hit = svc->handle_analyze(analyze_body("https://www.example.com/a"));
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    EXPECT_TRUE(hit.body["cached"].get<bool>());
    EXPECT_LT(ms, 5.0);
}

TEST(ServiceTest, TtlExpiryForcesRescore) {
    FakeClock clock;
    auto svc = make_service(clock);
    svc->handle_analyze(analyze_body("https://www.example.com/"));
    clock.ms->fetch_add((kDefaultTtlSeconds + 1) * 1000);
    const auto again = svc->handle_analyze(analyze_body("https://www.example.com/"));
    EXPECT_FALSE(again.body["cached"].get<bool>());
    EXPECT_EQ(svc->model_evaluations(), 2u);
}

TEST(ServiceTest, ErrorResponses) {
    FakeClock clock;
    auto svc = make_service(clock);
    const auto bad_url = svc->handle_analyze(analyze_body("notaurl"));
    EXPECT_EQ(bad_url.status, 400);
    EXPECT_EQ(bad_url.body["error_code"], "malformed_url");
    EXPECT_EQ(svc->handle_analyze(analyze_body("ftp://example.com/")).body["error_code"], "unsupported_scheme");

    EXPECT_EQ(svc->handle_analyze("{").status, 422);
    EXPECT_EQ(svc->handle_analyze(R"({"url": 5})").status, 422);
    EXPECT_EQ(svc->handle_analyze(R"({"url": "https://a.test/", "extra": 1})").status, 422);
    EXPECT_EQ(svc->handle_analyze(R"({"url": "https://a.test/", "session_id": "bad id!"})").status, 422);
    EXPECT_EQ(svc->handle_analyze(R"({"url": "https://a.test/"})").body.contains("error_code"), false);
    EXPECT_EQ(svc->model_evaluations(), 1u);
}

TEST(ServiceTest, UnavailableBeforeBundle) {
    FakeClock clock;
    auto svc = make_service(clock, false);
    EXPECT_FALSE(svc->ready());
    const auto r = svc->handle_analyze(analyze_body("https://www.example.com/"));
    EXPECT_EQ(r.status, 503);
    EXPECT_EQ(svc->handle_health().body["status"], "degraded");
    EXPECT_EQ(svc->handle_models_info().status, 503);
    svc->load_bundle(testing::golden_bundle());
    EXPECT_EQ(svc->handle_health().body["status"], "ok");
}

TEST(ServiceTest, SeedListHitSkipsModels) {
    FakeClock clock;
    ReputationStore store;
    store.load_seed_list(testing::fixture("seed_list.jsonl"), testing::kFixedNowMs / 1000);
    auto svc = make_service(clock, true, std::move(store));
    const auto r = svc->handle_analyze(analyze_body("http://FREE-GIFT-CARDS.click/claim"));
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(r.body["verdict"], "danger");
    EXPECT_TRUE(r.body["alert"].get<bool>());
    EXPECT_TRUE(r.body["cached"].get<bool>());
    EXPECT_TRUE(r.body["model_outputs"].is_null());
    EXPECT_EQ(svc->model_evaluations(), 0u);
}

TEST(ServiceTest, KnownBadPageIsDanger) {
    FakeClock clock;
    auto svc = make_service(clock);
    json req{{"url", testing::known_bad_url()}, {"html", testing::read_file(testing::fixture("known_bad.html"))}};
    const auto r = svc->handle_analyze(req.dump());
    ASSERT_EQ(r.status, 200) << r.body.dump();
    EXPECT_EQ(r.body["verdict"], "danger");
    EXPECT_GE(r.body["score"].get<double>(), 70.0);
    EXPECT_EQ(r.body["explanation"].size(), 5u);
}

TEST(ServiceTest, SessionHiddenRedirectRaisesToDanger) {
    FakeClock clock;
    auto svc = make_service(clock);
    const auto start = svc->handle_analyze(analyze_body("https://www.example.com/", "s1"));
    ASSERT_EQ(start.status, 200);
    ASSERT_EQ(start.body["verdict"], "safe");
    const double base = start.body["score"].get<double>();

    const auto t0 = testing::kFixedNowMs;
    auto r = svc->handle_session_event("s1", event("navigation", t0 + 10));
    ASSERT_EQ(r.status, 200) << r.body.dump();
    EXPECT_GE(r.body["score"].get<double>(), base);
    r = svc->handle_session_event(
        "s1", event("redirect", t0 + 100, {{"target_host", "Login.Evil.TK"}, {"cross_origin", true}}));
    ASSERT_EQ(r.status, 200);
    EXPECT_GE(r.body["score"].get<double>(), 70.0);
    EXPECT_EQ(r.body["verdict"], "danger");
    EXPECT_EQ(r.body["events_recorded"], 2);

    const auto dup = svc->handle_session_event(
        "s1", event("redirect", t0 + 100, {{"target_host", "login.evil.tk"}, {"cross_origin", true}}));
    EXPECT_TRUE(dup.body["duplicate"].get<bool>());
    EXPECT_EQ(dup.body["events_recorded"], 2);

    const auto got = svc->handle_score_get("s1");
    EXPECT_EQ(got.body["score"], r.body["score"]);
    EXPECT_EQ(got.body["verdict"], "danger");

    // The raised verdict is now what the cache serves.
    const auto cached = svc->handle_analyze(analyze_body("https://www.example.com/"));
    EXPECT_EQ(cached.body["verdict"], "danger");
}

TEST(ServiceTest, SessionErrors) {
    FakeClock clock;
    auto svc = make_service(clock);
    EXPECT_EQ(svc->handle_session_event("nope", event("click", 1)).status, 404);
    EXPECT_EQ(svc->handle_score_get("nope").status, 404);
    svc->handle_analyze(analyze_body("https://www.example.com/", "s2"));
    EXPECT_EQ(svc->handle_session_event("s2", "{").status, 422);
    EXPECT_EQ(svc->handle_session_event("s2", event("teleport", 1)).status, 422);
    EXPECT_EQ(svc->handle_session_event("s2", event("click", 1, {{"value", "hunter2"}})).status, 422);
    EXPECT_EQ(svc->handle_session_event("s2", event("form_submit", 1, {{"field_counts", {{"password", "x"}}}})).status,
              422);
    EXPECT_EQ(svc->handle_session_event("s2", event("click", 1, {{"field_counts", {{"text", 1}}}})).status, 422);
    EXPECT_EQ(svc->handle_session_event("s2", event("click", 1, {{"flags", {"Has Space"}}})).status, 422);
    EXPECT_EQ(svc->handle_session_event("s2", event("click", 1)).status, 200);
}

TEST(SessionEventCodecTest, RoundTrip) {
    SessionEvent e;
    e.kind = EventKind::kFormSubmit;
    e.timestamp_ms = 123;
    e.target_host = "pay.example.net";
    e.cross_origin = true;
    e.metadata_flags = {"autofill"};
    e.field_counts = {{"password", 1}, {"text", 2}};
    EXPECT_EQ(decode_session_event(encode_session_event(e)), e);
    EXPECT_THROW(decode_session_event(json{{"kind", "click"}}), Error);
}

TEST(ServiceTest, JournalCarriesNoFieldValues) {
    FakeClock clock;
    const auto path = std::filesystem::temp_directory_path() / "sentinel_privacy_journal.jsonl";
    std::filesystem::remove(path);
    {
        auto svc = make_service(clock);
        svc->store().attach_journal(path);
        json req{{"url", "https://www.example.com/login"},
                 {"html", "<form><input type=password value=\"hunter2secret\"></form>"},
                 {"session_id", "p1"}};
        ASSERT_EQ(svc->handle_analyze(req.dump()).status, 200);
        svc->handle_session_event(
            "p1", event("form_submit", testing::kFixedNowMs + 5,
                        {{"target_host", "collect.evil.tk"}, {"field_counts", {{"password", 1}}}}));
    }
    const auto text = testing::read_file(path);
    EXPECT_FALSE(text.empty());
    EXPECT_EQ(text.find("hunter2secret"), std::string::npos);
    EXPECT_EQ(text.find("<form"), std::string::npos);
    std::filesystem::remove(path);
}

TEST(ServiceTest, HealthAndModelsInfo) {
    FakeClock clock;
    auto svc = make_service(clock);
    const auto health = svc->handle_health();
    EXPECT_EQ(health.body["status"], "ok");
    EXPECT_EQ(health.body["store_entries"], 0);
    const auto info = svc->handle_models_info();
    ASSERT_EQ(info.status, 200);
    EXPECT_EQ(info.body["manifest"], default_manifest());
    EXPECT_EQ(info.body["training_seed"], 42);
}

TEST(ServiceTest, ConcurrentAnalyzeAndEvents) {
    FakeClock clock;
    auto svc = make_service(clock);
    for (int s = 0; s < 4; ++s) {
        svc->handle_analyze(analyze_body("https://www.example.com/", "c" + std::to_string(s)));
    }
    std::vector<std::thread> threads;
    std::atomic<int> failures{0};
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            const std::string sid = "c" + std::to_string(t);
            double last = 0.0;
            for (int i = 0; i < 40; ++i) {
                const auto a = svc->handle_analyze(analyze_body("https://h" + std::to_string(i % 8) + ".example.com/"));
                if (a.status != 200) ++failures;
                const auto r = svc->handle_session_event(sid, event(i % 2 ? "request" : "click",
                                                                    testing::kFixedNowMs + i,
                                                                    {{"target_host", "cdn.other.net"}}));
                if (r.status != 200) ++failures;
                const double score = r.body["score"].get<double>();
                if (score < last) ++failures;
                last = score;
            }
        });
    }
    for (auto& th : threads) th.join();
    EXPECT_EQ(failures.load(), 0);
    EXPECT_EQ(svc->store().size(), 9u);
}

TEST(ServiceTest, HttpRoundTrip) {
    FakeClock clock;
    auto svc = make_service(clock);
    httplib::Server server;
    svc->register_routes(server);
    const int port = server.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    auto health = client.Get("/api/v1/health");
    ASSERT_TRUE(health);
    EXPECT_EQ(health->status, 200);
    auto analyzed = client.Post("/api/v1/analyze", analyze_body("https://www.example.com/", "h1"), "application/json");
    ASSERT_TRUE(analyzed);
    EXPECT_EQ(analyzed->status, 200);
    EXPECT_EQ(json::parse(analyzed->body)["session_id"], "h1");
    auto ev = client.Post("/api/v1/sessions/h1/events", event("click", testing::kFixedNowMs + 1), "application/json");
    ASSERT_TRUE(ev);
    EXPECT_EQ(ev->status, 200);
    auto score = client.Get("/api/v1/sessions/h1/score");
    ASSERT_TRUE(score);
    EXPECT_EQ(json::parse(score->body)["events_recorded"], 1);
    auto missing = client.Get("/api/v1/sessions/zz/score");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);
    auto bad = client.Post("/api/v1/analyze", "{\"url\": \"notaurl\"}", "application/json");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 400);

    server.stop();
    th.join();
}

}  // namespace
}  // namespace sentinel
