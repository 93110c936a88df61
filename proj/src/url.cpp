#include "sentinel/url.hpp"

#include <algorithm>
#include <charconv>
#include <vector>

#include "sentinel/error.hpp"

namespace sentinel {

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
    });
    return out;
}

bool is_scheme_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '+' ||
           c == '-' || c == '.';
}

bool is_host_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '_';
}

std::vector<std::string_view> split_labels(std::string_view host) {
    std::vector<std::string_view> labels;
    std::size_t start = 0;
    while (true) {
        const auto dot = host.find('.', start);
        labels.push_back(host.substr(start, dot == std::string_view::npos ? host.npos : dot - start));
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return labels;
}

bool is_ipv4(std::string_view host) {
    const auto labels = split_labels(host);
    if (labels.size() != 4) return false;
    for (auto label : labels) {
        if (label.empty() || label.size() > 3) return false;
        int value = 0;
        const auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), value);
        if (ec != std::errc{} || ptr != label.data() + label.size() || value > 255) return false;
    }
    return true;
}

// Everything the parser extracts before validation, in raw spelling.
struct RawComponents {
    std::string_view scheme;
    std::string_view userinfo;
    std::string_view host;
    std::string_view port;
    bool has_port = false;
    std::string_view path;
    std::string_view query;
    bool has_query = false;
};

RawComponents split_components(std::string_view raw) {
    RawComponents c;
    const auto colon = raw.find(':');
    if (colon == std::string_view::npos || colon == 0 || raw.substr(colon + 1, 2) != "//") {
        throw Error(ErrorCode::kMalformedUrl, "no scheme in '" + std::string(raw) + "'");
    }
    c.scheme = raw.substr(0, colon);
    if (!std::all_of(c.scheme.begin(), c.scheme.end(), is_scheme_char)) {
        throw Error(ErrorCode::kMalformedUrl, "invalid scheme in '" + std::string(raw) + "'");
    }

    std::string_view rest = raw.substr(colon + 3);
    const auto hash = rest.find('#');
    if (hash != std::string_view::npos) rest = rest.substr(0, hash);

    const auto authority_end = rest.find_first_of("/?");
    std::string_view authority = rest.substr(0, authority_end);
    std::string_view tail = authority_end == std::string_view::npos ? std::string_view{} : rest.substr(authority_end);

    const auto at = authority.rfind('@');
    if (at != std::string_view::npos) {
        c.userinfo = authority.substr(0, at);
        authority = authority.substr(at + 1);
    }

    if (!authority.empty() && authority.front() == '[') {
        const auto close = authority.find(']');
        if (close == std::string_view::npos) {
            throw Error(ErrorCode::kMalformedUrl, "unterminated IPv6 literal in '" + std::string(raw) + "'");
        }
        c.host = authority.substr(0, close + 1);
        const auto after = authority.substr(close + 1);
        if (!after.empty()) {
            if (after.front() != ':') throw Error(ErrorCode::kMalformedUrl, "junk after IPv6 literal");
            c.port = after.substr(1);
            c.has_port = true;
        }
    } else {
        const auto port_colon = authority.rfind(':');
        if (port_colon != std::string_view::npos) {
            c.host = authority.substr(0, port_colon);
            c.port = authority.substr(port_colon + 1);
            c.has_port = true;
        } else {
            c.host = authority;
        }
    }

    const auto q = tail.find('?');
    if (q != std::string_view::npos) {
        c.path = tail.substr(0, q);
        c.query = tail.substr(q + 1);
        c.has_query = true;
    } else {
        c.path = tail;
    }
    return c;
}

std::optional<int> parse_port(const RawComponents& c, std::string_view raw) {
    if (!c.has_port) return std::nullopt;
    if (c.port.empty()) return std::nullopt;  // "host:" means default port
    int port = 0;
    const auto [ptr, ec] = std::from_chars(c.port.data(), c.port.data() + c.port.size(), port);
    if (ec != std::errc{} || ptr != c.port.data() + c.port.size() || port < 0 || port > 65535) {
        throw Error(ErrorCode::kMalformedUrl, "bad port in '" + std::string(raw) + "'");
    }
    return port;
}

std::string normalize_host(std::string_view host_raw, std::string_view raw) {
    std::string host = to_lower(host_raw);
    if (!host.empty() && host.back() == '.') host.pop_back();
    if (host.empty()) throw Error(ErrorCode::kMalformedUrl, "empty host in '" + std::string(raw) + "'");
    if (host.front() == '[') return host;
    if (!std::all_of(host.begin(), host.end(), is_host_char)) {
        throw Error(ErrorCode::kMalformedUrl, "invalid host characters in '" + std::string(raw) + "'");
    }
    for (auto label : split_labels(host)) {
        if (label.empty()) throw Error(ErrorCode::kMalformedUrl, "empty host label in '" + std::string(raw) + "'");
    }
    return host;
}

}  // namespace

bool is_ip_literal(std::string_view host) {
    return (!host.empty() && host.front() == '[') || is_ipv4(host);
}

std::string registrable_domain(std::string_view host) {
    if (host.empty() || is_ip_literal(host)) return std::string(host);
    const auto labels = split_labels(host);
    // Longest matching suffix wins; an unlisted TLD is its own suffix.
    std::size_t suffix_labels = 1;
    for (std::size_t n = labels.size(); n >= 1; --n) {
        const auto start = static_cast<std::size_t>(labels[labels.size() - n].data() - host.data());
        if (is_public_suffix(host.substr(start))) {
            suffix_labels = n;
            break;
        }
    }
    if (suffix_labels >= labels.size()) return std::string(host);
    const auto start = static_cast<std::size_t>(labels[labels.size() - suffix_labels - 1].data() - host.data());
    return std::string(host.substr(start));
}

UrlParts parse_url(std::string_view raw) {
    if (raw.empty()) throw Error(ErrorCode::kMalformedUrl, "empty URL");
    const auto c = split_components(raw);

    UrlParts parts;
    parts.scheme = to_lower(c.scheme);
    if (parts.scheme != "http" && parts.scheme != "https") {
        throw Error(ErrorCode::kUnsupportedScheme, "scheme '" + parts.scheme + "' is not http or https");
    }
    parts.userinfo = std::string(c.userinfo);
    parts.host = normalize_host(c.host, raw);
    parts.port = parse_port(c, raw);
    parts.path = std::string(c.path);
    parts.query = std::string(c.query);
    parts.host_is_ip = is_ip_literal(parts.host);
    parts.registrable_domain = registrable_domain(parts.host);
    if (!parts.host_is_ip && parts.host.size() > parts.registrable_domain.size()) {
        const auto left = std::string_view(parts.host).substr(0, parts.host.size() - parts.registrable_domain.size());
        parts.subdomain_count = static_cast<int>(std::count(left.begin(), left.end(), '.'));
    }
    return parts;
}

std::string canonicalize(std::string_view raw) {
    const auto parts = parse_url(raw);
    const auto c = split_components(raw);
    std::string out = parts.scheme + "://";
    if (!parts.userinfo.empty()) out += parts.userinfo + "@";
    out += parts.host;
    const int default_port = parts.scheme == "https" ? 443 : 80;
    if (parts.port && *parts.port != default_port) out += ":" + std::to_string(*parts.port);
    out += parts.path.empty() ? "/" : parts.path;
    if (c.has_query) out += "?" + parts.query;
    return out;
}

}  // namespace sentinel
