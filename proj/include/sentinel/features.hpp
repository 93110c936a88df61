#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sentinel/url.hpp"

namespace sentinel {

struct UrlLexicalFeatures {
    int url_length = 0;
    int host_length = 0;
    double digit_ratio = 0.0;
    double char_entropy = 0.0;
    int subdomain_count = 0;
    bool has_at_symbol = false;
    bool has_punycode = false;
    int hyphen_count = 0;
    bool host_is_ip = false;
    bool suspicious_tld = false;
};

struct LexicalConfig {
    std::vector<std::string> suspicious_tlds{"tk", "ml", "ga", "cf", "gq", "xyz", "top", "zip", "click", "work"};
};

// Shannon entropy in bits. Codepoint-wise when the input holds valid
// non-ASCII UTF-8, byte-wise otherwise.
double shannon_entropy(std::string_view text);

UrlLexicalFeatures lexical_features(const UrlParts& parts, std::string_view raw, const LexicalConfig& config = {});

// --- Domain metadata -------------------------------------------------------

using Date = std::chrono::sys_days;

struct DomainRecord {
    std::optional<Date> created;
    std::optional<bool> cert_valid;
    std::optional<Date> cert_expiry;
};

class ProviderTimeout : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// WHOIS / certificate lookups. Implementations must tolerate concurrent calls.
class MetadataProvider {
public:
    virtual ~MetadataProvider() = default;
    // std::nullopt when the provider knows nothing about the host.
    virtual std::optional<DomainRecord> query(std::string_view host) const = 0;
};

// Table file: JSON object host -> {"created_date", "cert_valid", "cert_expiry"}
// with ISO-8601 dates. Every field is optional.
class FixtureMetadataProvider : public MetadataProvider {
public:
    FixtureMetadataProvider() = default;
    explicit FixtureMetadataProvider(std::map<std::string, DomainRecord, std::less<>> table) : table_(std::move(table)) {}

    static FixtureMetadataProvider load(const std::filesystem::path& path);
    static FixtureMetadataProvider parse(std::string_view json_text);

    std::optional<DomainRecord> query(std::string_view host) const override;

private:
    std::map<std::string, DomainRecord, std::less<>> table_;
};

struct DomainMetadata {
    std::optional<int> age_days;
    bool is_young = false;
    std::optional<bool> cert_valid;
    std::optional<int> cert_days_remaining;
    bool provider_resolved = false;
};

inline constexpr int kDefaultYoungDomainDays = 180;

// Looks up the host, then its registrable domain. Provider failures are
// logged and reported as provider_resolved = false.
DomainMetadata domain_metadata(std::string_view host, const MetadataProvider& provider, Date today,
                               int young_threshold_days = kDefaultYoungDomainDays);

// "YYYY-MM-DD", optionally followed by a "T..." time part which is ignored.
std::optional<Date> parse_iso_date(std::string_view text);
Date today_utc();

}  // namespace sentinel
