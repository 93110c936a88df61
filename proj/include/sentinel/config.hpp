#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sentinel/content.hpp"
#include "sentinel/features.hpp"
#include "sentinel/models/ensemble.hpp"
#include "sentinel/reputation.hpp"
#include "sentinel/scoring.hpp"
#include "sentinel/session.hpp"

namespace sentinel {

inline constexpr int kConfigVersion = 1;

struct StoreConfig {
    std::optional<std::filesystem::path> path;
    std::optional<std::filesystem::path> seed_list;
    std::int64_t ttl_seconds = kDefaultTtlSeconds;
};

struct EngineConfig {
    std::vector<std::string> manifest = default_manifest();
    EnsembleParams models;
    ScoringConfig scoring;
    SessionThresholds session;
    LexicalConfig lexical;
    int young_domain_days = kDefaultYoungDomainDays;
    std::optional<std::filesystem::path> metadata_fixture;
    ContentConfig content;
    StoreConfig store;
    std::size_t explanation_top_n = 5;

    // Throws Error{kInvalidConfig} on any inconsistent value.
    void validate() const;
};

// Strict: unknown keys anywhere are rejected with Error{kInvalidConfig}.
// Missing keys keep their defaults.
EngineConfig parse_config(std::string_view json_text, const std::string& source_name = "<config>");
EngineConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const EngineConfig& config);

// SENTINEL_CONFIG if set, else `flag_path`, else built-in defaults.
EngineConfig resolve_config(const std::optional<std::filesystem::path>& flag_path);

}  // namespace sentinel
