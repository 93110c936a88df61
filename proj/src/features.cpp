#include "sentinel/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "sentinel/error.hpp"

namespace sentinel {

namespace {

// Decodes UTF-8 into codepoints. Returns false on any invalid sequence.
bool decode_utf8(std::string_view text, std::vector<char32_t>& out) {
    out.clear();
    for (std::size_t i = 0; i < text.size();) {
        const auto c = static_cast<unsigned char>(text[i]);
        int extra = 0;
        char32_t cp = 0;
        if (c < 0x80) {
            cp = c;
        } else if ((c & 0xE0) == 0xC0) {
            cp = c & 0x1F;
            extra = 1;
        } else if ((c & 0xF0) == 0xE0) {
            cp = c & 0x0F;
            extra = 2;
        } else if ((c & 0xF8) == 0xF0) {
            cp = c & 0x07;
            extra = 3;
        } else {
            return false;
        }
        if (i + static_cast<std::size_t>(extra) >= text.size()) return false;
        for (int k = 1; k <= extra; ++k) {
            const auto cc = static_cast<unsigned char>(text[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        out.push_back(cp);
        i += static_cast<std::size_t>(extra) + 1;
    }
    return true;
}

template <class Symbols>
double entropy_of(const Symbols& symbols) {
    if (symbols.empty()) return 0.0;
    std::unordered_map<std::uint32_t, std::size_t> counts;
    for (auto s : symbols) ++counts[static_cast<std::uint32_t>(s)];
    // Accumulate in a fixed order so the result does not depend on hash layout.
    std::vector<std::size_t> freq;
    freq.reserve(counts.size());
    for (const auto& [sym, n] : counts) freq.push_back(n);
    std::sort(freq.begin(), freq.end());
    const double total = static_cast<double>(symbols.size());
    double h = 0.0;
    for (auto n : freq) {
        const double p = static_cast<double>(n) / total;
        h -= p * std::log2(p);
    }
    return h > 0.0 ? h : 0.0;
}

}  // namespace

double shannon_entropy(std::string_view text) {
    const bool ascii = std::all_of(text.begin(), text.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
    if (!ascii) {
        std::vector<char32_t> cps;
        if (decode_utf8(text, cps)) return entropy_of(cps);
    }
    std::vector<unsigned char> bytes(text.begin(), text.end());
    return entropy_of(bytes);
}

UrlLexicalFeatures lexical_features(const UrlParts& parts, std::string_view raw, const LexicalConfig& config) {
    UrlLexicalFeatures f;
    f.url_length = static_cast<int>(raw.size());
    f.host_length = static_cast<int>(parts.host.size());
    if (!raw.empty()) {
        const auto digits = std::count_if(raw.begin(), raw.end(), [](char c) { return c >= '0' && c <= '9'; });
        f.digit_ratio = static_cast<double>(digits) / static_cast<double>(raw.size());
    }
    f.char_entropy = shannon_entropy(raw);
    f.subdomain_count = parts.subdomain_count;
    f.has_at_symbol = raw.find('@') != std::string_view::npos;
    f.has_punycode = parts.host.starts_with("xn--") || parts.host.find(".xn--") != std::string::npos;
    f.hyphen_count = static_cast<int>(std::count(parts.host.begin(), parts.host.end(), '-'));
    f.host_is_ip = parts.host_is_ip;
    if (!parts.host_is_ip) {
        const auto dot = parts.host.rfind('.');
        const std::string tld = dot == std::string::npos ? parts.host : parts.host.substr(dot + 1);
        f.suspicious_tld = std::find(config.suspicious_tlds.begin(), config.suspicious_tlds.end(), tld) !=
                           config.suspicious_tlds.end();
    }
    return f;
}

std::optional<Date> parse_iso_date(std::string_view text) {
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') return std::nullopt;
    auto number = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int v = 0;
        const auto* b = text.data() + pos;
        const auto [ptr, ec] = std::from_chars(b, b + len, v);
        if (ec != std::errc{} || ptr != b + len) return std::nullopt;
        return v;
    };
    const auto y = number(0, 4);
    const auto m = number(5, 2);
    const auto d = number(8, 2);
    if (!y || !m || !d) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                                          std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{ymd};
}

Date today_utc() { return std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now()); }

FixtureMetadataProvider FixtureMetadataProvider::parse(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kParseError, std::string("metadata fixture: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::kSchemaError, "metadata fixture must be a JSON object");

    std::map<std::string, DomainRecord, std::less<>> table;
    for (const auto& [host, fields] : doc.items()) {
        if (!fields.is_object()) throw Error(ErrorCode::kSchemaError, "metadata fixture entry '" + host + "'");
        DomainRecord rec;
        for (const auto& [key, value] : fields.items()) {
            if (key == "created_date" || key == "cert_expiry") {
                const auto date = value.is_string() ? parse_iso_date(value.get<std::string>()) : std::nullopt;
                if (!date) throw Error(ErrorCode::kSchemaError, "bad " + key + " for '" + host + "'");
                (key == "created_date" ? rec.created : rec.cert_expiry) = date;
            } else if (key == "cert_valid") {
                if (!value.is_boolean()) throw Error(ErrorCode::kSchemaError, "bad cert_valid for '" + host + "'");
                rec.cert_valid = value.get<bool>();
            } else {
                throw Error(ErrorCode::kSchemaError, "unknown field '" + key + "' for '" + host + "'");
            }
        }
        table.emplace(host, rec);
    }
    return FixtureMetadataProvider(std::move(table));
}

FixtureMetadataProvider FixtureMetadataProvider::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIoError, "cannot open metadata fixture " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::optional<DomainRecord> FixtureMetadataProvider::query(std::string_view host) const {
    const auto it = table_.find(host);
    if (it == table_.end()) return std::nullopt;
    return it->second;
}

DomainMetadata domain_metadata(std::string_view host, const MetadataProvider& provider, Date today,
                               int young_threshold_days) {
    DomainMetadata meta;
    std::optional<DomainRecord> record;
    try {
        record = provider.query(host);
        if (!record) {
            const auto registrable = registrable_domain(host);
            if (registrable != host) record = provider.query(registrable);
        }
    } catch (const std::exception& e) {
        spdlog::warn("metadata provider failed for {}: {}", host, e.what());
        return meta;
    }
    if (!record) return meta;

    meta.provider_resolved = true;
    if (record->created) {
        meta.age_days = std::max(0, static_cast<int>((today - *record->created).count()));
        meta.is_young = *meta.age_days < young_threshold_days;
    }
    // A known host without a certificate record has no valid certificate.
    bool valid = record->cert_valid.value_or(false);
    if (valid && record->cert_expiry && *record->cert_expiry < today) valid = false;
    meta.cert_valid = valid;
    meta.cert_days_remaining = record->cert_expiry ? static_cast<int>((*record->cert_expiry - today).count()) : 0;
    return meta;
}

}  // namespace sentinel
