#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sentinel/verdict.hpp"

namespace sentinel {

enum class EntrySource { kMlPipeline, kSeedList, kManual };

std::string_view source_name(EntrySource s);
std::optional<EntrySource> parse_source(std::string_view name);

struct ReputationEntry {
    std::string canonical_url;
    double score = 0.0;
    Verdict verdict = Verdict::kSafe;
    std::int64_t stored_at = 0;  // epoch seconds
    std::int64_t ttl_seconds = 0;
    EntrySource source = EntrySource::kMlPipeline;

    bool expired(std::int64_t now) const { return now - stored_at > ttl_seconds; }
    bool operator==(const ReputationEntry&) const = default;
};

struct JournalIssue {
    std::size_t line = 0;
    std::string message;
};

inline constexpr std::int64_t kDefaultTtlSeconds = 24 * 60 * 60;

// Canonical-URL verdict cache. Individual operations are atomic; journal
// appends are serialized.
class ReputationStore {
public:
    explicit ReputationStore(std::int64_t default_ttl_seconds = kDefaultTtlSeconds);
    ReputationStore(ReputationStore&& other) noexcept;
    ReputationStore& operator=(ReputationStore&& other) noexcept;

    // Never returns an expired entry. Throws Error{kMalformedUrl}.
    std::optional<ReputationEntry> lookup(std::string_view raw_url, std::int64_t now) const;

    // Replaces any entry for the canonical URL. Throws Error{kInvalidScore}
    // for scores outside [0, 100] and Error{kMalformedUrl}.
    void upsert(std::string_view raw_url, double score, Verdict verdict, EntrySource source, std::int64_t now,
                std::optional<std::int64_t> ttl_seconds = std::nullopt);

    std::size_t prune_expired(std::int64_t now);
    std::size_t size() const;
    std::int64_t default_ttl() const { return default_ttl_; }

    // Snapshot of every entry, one JSON object per line.
    void persist(const std::filesystem::path& path) const;

    // Replays a journal, last writer wins, dropping entries expired at `now`.
    // Corrupt lines are skipped and reported through `issues`.
    static ReputationStore restore(const std::filesystem::path& path, std::int64_t now,
                                   std::vector<JournalIssue>* issues = nullptr,
                                   std::int64_t default_ttl_seconds = kDefaultTtlSeconds);

    // Appends every subsequent upsert to `path` (creating it if needed).
    void attach_journal(const std::filesystem::path& path);

    // Seed list: journal records without stored_at; loaded with source
    // seed_list and stored_at = now. Returns entries loaded.
    std::size_t load_seed_list(const std::filesystem::path& path, std::int64_t now,
                               std::vector<JournalIssue>* issues = nullptr);

    std::vector<ReputationEntry> entries() const;

private:
    void put(ReputationEntry entry);

    std::int64_t default_ttl_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, ReputationEntry> entries_;
    std::mutex journal_mutex_;
    std::ofstream journal_;
};

std::string entry_to_json_line(const ReputationEntry& e);

}  // namespace sentinel
