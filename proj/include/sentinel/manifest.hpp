#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sentinel/content.hpp"
#include "sentinel/features.hpp"
#include "sentinel/session.hpp"

namespace sentinel {

using FeatureVector = std::vector<double>;

// Frozen feature layout shared by extraction, datasets and models.
// Index order is part of the bundle format; append only.
namespace feature {
enum Index : std::size_t {
    kUrlLength,
    kHostLength,
    kDigitRatio,
    kCharEntropy,
    kSubdomainCount,
    kHasAtSymbol,
    kHasPunycode,
    kHyphenCount,
    kHostIsIp,
    kSuspiciousTld,
    kDomainAgeDays,
    kDomainIsYoung,
    kCertValid,
    kCertDaysRemaining,
    kDomainResolved,
    kContentPresent,
    kFormCount,
    kPasswordInputCount,
    kSensitiveInputCount,
    kExternalFormActions,
    kScriptCount,
    kExternalScriptRatio,
    kIframeCount,
    kHiddenElementCount,
    kMetaRefreshPresent,
    kMetaRefreshCrossOrigin,
    kExternalLinkRatio,
    kMaxScriptObfuscation,
    kRedirectChainLength,
    kCrossOriginHops,
    kRapidRedirectCount,
    kThirdPartyRequestRatio,
    kUniqueThirdPartyDomains,
    kExternalFormSubmit,
    kSensitiveFieldFocusCount,
    kHiddenRedirectFlag,
    kCount,
};
}  // namespace feature

inline constexpr std::size_t kFeatureCount = feature::kCount;
inline constexpr std::size_t kFirstSessionFeature = feature::kRedirectChainLength;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "url_length",
    "host_length",
    "digit_ratio",
    "char_entropy",
    "subdomain_count",
    "has_at_symbol",
    "has_punycode",
    "hyphen_count",
    "host_is_ip",
    "suspicious_tld",
    "domain_age_days",
    "domain_is_young",
    "cert_valid",
    "cert_days_remaining",
    "domain_resolved",
    "content_present",
    "form_count",
    "password_input_count",
    "sensitive_input_count",
    "external_form_actions",
    "script_count",
    "external_script_ratio",
    "iframe_count",
    "hidden_element_count",
    "meta_refresh_present",
    "meta_refresh_cross_origin",
    "external_link_ratio",
    "max_script_obfuscation",
    "redirect_chain_length",
    "cross_origin_hops",
    "rapid_redirect_count",
    "third_party_request_ratio",
    "unique_third_party_domains",
    "external_form_submit",
    "sensitive_field_focus_count",
    "hidden_redirect_flag",
};

std::vector<std::string> default_manifest();

// Missing domain metadata and absent HTML encode as zeros, with
// domain_resolved / content_present telling models the values are unknown.
FeatureVector assemble_features(const UrlLexicalFeatures& url, const DomainMetadata& domain,
                                const std::optional<ContentFeatures>& content, const SessionFeatures& session = {});

// Overwrites the session slots of `x`.
void apply_session_features(FeatureVector& x, const SessionFeatures& session);

}  // namespace sentinel
