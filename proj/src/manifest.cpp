#include "sentinel/manifest.hpp"

namespace sentinel {

std::vector<std::string> default_manifest() { return {kFeatureNames.begin(), kFeatureNames.end()}; }

FeatureVector assemble_features(const UrlLexicalFeatures& url, const DomainMetadata& domain,
                                const std::optional<ContentFeatures>& content, const SessionFeatures& session) {
    using namespace feature;
    FeatureVector x(kFeatureCount, 0.0);
    auto flag = [](bool b) { return b ? 1.0 : 0.0; };

    x[kUrlLength] = url.url_length;
    x[kHostLength] = url.host_length;
    x[kDigitRatio] = url.digit_ratio;
    x[kCharEntropy] = url.char_entropy;
    x[kSubdomainCount] = url.subdomain_count;
    x[kHasAtSymbol] = flag(url.has_at_symbol);
    x[kHasPunycode] = flag(url.has_punycode);
    x[kHyphenCount] = url.hyphen_count;
    x[kHostIsIp] = flag(url.host_is_ip);
    x[kSuspiciousTld] = flag(url.suspicious_tld);

    x[kDomainAgeDays] = domain.age_days.value_or(0);
    x[kDomainIsYoung] = flag(domain.is_young);
    x[kCertValid] = flag(domain.cert_valid.value_or(false));
    x[kCertDaysRemaining] = domain.cert_days_remaining.value_or(0);
    x[kDomainResolved] = flag(domain.provider_resolved);

    if (content) {
        x[kContentPresent] = 1.0;
        x[kFormCount] = content->form_count;
        x[kPasswordInputCount] = content->password_input_count;
        x[kSensitiveInputCount] = content->sensitive_input_count;
        x[kExternalFormActions] = content->external_form_actions;
        x[kScriptCount] = content->script_count;
        x[kExternalScriptRatio] = content->external_script_ratio;
        x[kIframeCount] = content->iframe_count;
        x[kHiddenElementCount] = content->hidden_element_count;
        x[kMetaRefreshPresent] = flag(content->meta_refresh_present);
        x[kMetaRefreshCrossOrigin] = flag(content->meta_refresh_cross_origin);
        x[kExternalLinkRatio] = content->external_link_ratio;
        x[kMaxScriptObfuscation] = content->max_script_obfuscation;
    }

    apply_session_features(x, session);
    return x;
}

void apply_session_features(FeatureVector& x, const SessionFeatures& s) {
    using namespace feature;
    x[kRedirectChainLength] = s.redirect_chain_length;
    x[kCrossOriginHops] = s.cross_origin_hops;
    x[kRapidRedirectCount] = s.rapid_redirect_count;
    x[kThirdPartyRequestRatio] = s.third_party_request_ratio;
    x[kUniqueThirdPartyDomains] = s.unique_third_party_domains;
    x[kExternalFormSubmit] = s.external_form_submit ? 1.0 : 0.0;
    x[kSensitiveFieldFocusCount] = s.sensitive_field_focus_count;
    x[kHiddenRedirectFlag] = s.hidden_redirect_flag ? 1.0 : 0.0;
}

}  // namespace sentinel
