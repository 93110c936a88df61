#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace sentinel {

struct UrlParts {
    std::string scheme;
    std::string userinfo;
    std::string host;
    bool host_is_ip = false;
    std::string registrable_domain;
    int subdomain_count = 0;
    std::string path;
    std::string query;
    std::optional<int> port;

    bool operator==(const UrlParts&) const = default;
};

// Accepts http and https URLs only. Throws Error{kMalformedUrl} or
// Error{kUnsupportedScheme}.
UrlParts parse_url(std::string_view raw);

// Lowercase scheme and host, drop default ports and the fragment, keep
// userinfo, path and query verbatim. Idempotent.
std::string canonicalize(std::string_view raw);

// Public-suffix-plus-one for a lowercase hostname, using the bundled snapshot.
// IP literals are returned unchanged.
std::string registrable_domain(std::string_view host);

bool is_ip_literal(std::string_view host);

// True when `suffix` is in the bundled public-suffix snapshot.
bool is_public_suffix(std::string_view suffix);

}  // namespace sentinel
