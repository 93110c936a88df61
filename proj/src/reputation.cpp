#include "sentinel/reputation.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "sentinel/error.hpp"
#include "sentinel/url.hpp"

namespace sentinel {

using nlohmann::json;

std::string_view source_name(EntrySource s) {
    switch (s) {
        case EntrySource::kMlPipeline: return "ml_pipeline";
        case EntrySource::kSeedList: return "seed_list";
        case EntrySource::kManual: return "manual";
    }
    return "ml_pipeline";
}

std::optional<EntrySource> parse_source(std::string_view name) {
    for (auto s : {EntrySource::kMlPipeline, EntrySource::kSeedList, EntrySource::kManual}) {
        if (source_name(s) == name) return s;
    }
    return std::nullopt;
}

std::string entry_to_json_line(const ReputationEntry& e) {
    const json j{{"canonical_url", e.canonical_url},
                 {"score", e.score},
                 {"verdict", verdict_name(e.verdict)},
                 {"stored_at", e.stored_at},
                 {"ttl_seconds", e.ttl_seconds},
                 {"source", source_name(e.source)}};
    return j.dump();
}

namespace {

void check_score(double score) {
    if (!(score >= 0.0 && score <= 100.0)) {
        throw Error(ErrorCode::kInvalidScore, "score " + std::to_string(score) + " is outside [0, 100]");
    }
}

// Parses one journal or seed record; throws Error{kCorruptJournal}.
ReputationEntry parse_record(std::string_view line, bool require_stored_at) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::kCorruptJournal, ex.what());
    }
    try {
        if (!j.is_object()) throw Error(ErrorCode::kCorruptJournal, "record is not an object");
        ReputationEntry e;
        e.canonical_url = canonicalize(j.at("canonical_url").get<std::string>());
        e.score = j.at("score").get<double>();
        check_score(e.score);
        const auto verdict = parse_verdict(j.at("verdict").get<std::string>());
        if (!verdict) throw Error(ErrorCode::kCorruptJournal, "unknown verdict");
        e.verdict = *verdict;
        if (require_stored_at) e.stored_at = j.at("stored_at").get<std::int64_t>();
        e.ttl_seconds = j.at("ttl_seconds").get<std::int64_t>();
        if (e.ttl_seconds <= 0) throw Error(ErrorCode::kCorruptJournal, "ttl_seconds must be > 0");
        if (j.contains("source")) {
            const auto source = parse_source(j.at("source").get<std::string>());
            if (!source) throw Error(ErrorCode::kCorruptJournal, "unknown source");
            e.source = *source;
        }
        return e;
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::kCorruptJournal, ex.what());
    } catch (const Error& ex) {
        if (ex.code() == ErrorCode::kCorruptJournal) throw;
        throw Error(ErrorCode::kCorruptJournal, ex.what());
    }
}

template <class OnRecord>
void replay(const std::filesystem::path& path, std::vector<JournalIssue>* issues, OnRecord on_record) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            on_record(line);
        } catch (const Error& ex) {
            spdlog::warn("{}:{}: skipping corrupt record: {}", path.string(), line_no, ex.what());
            if (issues) issues->push_back({line_no, ex.what()});
        }
    }
}

}  // namespace

ReputationStore::ReputationStore(std::int64_t default_ttl_seconds) : default_ttl_(default_ttl_seconds) {
    if (default_ttl_seconds <= 0) throw Error(ErrorCode::kInvalidConfig, "TTL must be > 0");
}

ReputationStore::ReputationStore(ReputationStore&& other) noexcept
    : default_ttl_(other.default_ttl_), entries_(std::move(other.entries_)), journal_(std::move(other.journal_)) {}

ReputationStore& ReputationStore::operator=(ReputationStore&& other) noexcept {
    if (this != &other) {
        default_ttl_ = other.default_ttl_;
        entries_ = std::move(other.entries_);
        journal_ = std::move(other.journal_);
    }
    return *this;
}

std::optional<ReputationEntry> ReputationStore::lookup(std::string_view raw_url, std::int64_t now) const {
    const auto key = canonicalize(raw_url);
    std::shared_lock lock(mutex_);
    const auto it = entries_.find(key);
    if (it == entries_.end() || it->second.expired(now)) return std::nullopt;
    return it->second;
}

void ReputationStore::put(ReputationEntry entry) {
    std::unique_lock lock(mutex_);
    auto key = entry.canonical_url;
    entries_.insert_or_assign(std::move(key), std::move(entry));
}

void ReputationStore::upsert(std::string_view raw_url, double score, Verdict verdict, EntrySource source,
                             std::int64_t now, std::optional<std::int64_t> ttl_seconds) {
    check_score(score);
    const auto ttl = ttl_seconds.value_or(default_ttl_);
    if (ttl <= 0) throw Error(ErrorCode::kInvalidConfig, "TTL must be > 0");
    ReputationEntry entry{canonicalize(raw_url), score, verdict, now, ttl, source};
    const auto line = entry_to_json_line(entry);
    put(std::move(entry));
    std::lock_guard lock(journal_mutex_);
    if (journal_.is_open()) {
        journal_ << line << '\n';
        journal_.flush();
    }
}

std::size_t ReputationStore::prune_expired(std::int64_t now) {
    std::unique_lock lock(mutex_);
    return std::erase_if(entries_, [now](const auto& kv) { return kv.second.expired(now); });
}

std::size_t ReputationStore::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::vector<ReputationEntry> ReputationStore::entries() const {
    std::vector<ReputationEntry> out;
    {
        std::shared_lock lock(mutex_);
        out.reserve(entries_.size());
        for (const auto& [k, v] : entries_) out.push_back(v);
    }
    std::sort(out.begin(), out.end(),
              [](const ReputationEntry& a, const ReputationEntry& b) { return a.canonical_url < b.canonical_url; });
    return out;
}

void ReputationStore::persist(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write journal " + path.string());
    for (const auto& e : entries()) out << entry_to_json_line(e) << '\n';
    if (!out) throw Error(ErrorCode::kIoError, "write failed for journal " + path.string());
}

ReputationStore ReputationStore::restore(const std::filesystem::path& path, std::int64_t now,
                                         std::vector<JournalIssue>* issues, std::int64_t default_ttl_seconds) {
    ReputationStore store(default_ttl_seconds);
    replay(path, issues, [&](std::string_view line) { store.put(parse_record(line, true)); });
    store.prune_expired(now);
    return store;
}

void ReputationStore::attach_journal(const std::filesystem::path& path) {
    std::lock_guard lock(journal_mutex_);
    journal_.close();
    journal_.open(path, std::ios::binary | std::ios::app);
    if (!journal_) throw Error(ErrorCode::kIoError, "cannot open journal " + path.string());
}

std::size_t ReputationStore::load_seed_list(const std::filesystem::path& path, std::int64_t now,
                                            std::vector<JournalIssue>* issues) {
    std::size_t loaded = 0;
    replay(path, issues, [&](std::string_view line) {
        auto e = parse_record(line, false);
        e.stored_at = now;
        e.source = EntrySource::kSeedList;
        put(std::move(e));
        ++loaded;
    });
    return loaded;
}

}  // namespace sentinel
