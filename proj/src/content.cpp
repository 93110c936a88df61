#include "sentinel/content.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <utility>

#include "sentinel/features.hpp"
#include "sentinel/url.hpp"

namespace sentinel {

namespace {

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), lower);
    return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

bool is_hex(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

// Case-insensitive search for an ASCII needle.
std::size_t ifind(std::string_view hay, std::string_view needle, std::size_t from = 0) {
    if (needle.empty() || hay.size() < needle.size()) return std::string_view::npos;
    for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
        std::size_t k = 0;
        while (k < needle.size() && lower(hay[i + k]) == needle[k]) ++k;
        if (k == needle.size()) return i;
    }
    return std::string_view::npos;
}

struct Tag {
    std::string name;  // lowercase, without '/'
    bool closing = false;
    std::vector<std::pair<std::string, std::string>> attrs;  // names lowercase

    const std::string* attr(std::string_view key) const {
        for (const auto& [k, v] : attrs) {
            if (k == key) return &v;
        }
        return nullptr;
    }
};

// Parses a tag starting at html[pos] == '<'. Returns the position after '>'
// (or end of input), filling `tag`.
std::size_t parse_tag(std::string_view html, std::size_t pos, Tag& tag) {
    std::size_t i = pos + 1;
    if (i < html.size() && html[i] == '/') {
        tag.closing = true;
        ++i;
    }
    const std::size_t name_start = i;
    while (i < html.size() && !is_space(html[i]) && html[i] != '>' && html[i] != '/') ++i;
    tag.name = to_lower(html.substr(name_start, i - name_start));

    while (i < html.size() && html[i] != '>') {
        if (is_space(html[i]) || html[i] == '/') {
            ++i;
            continue;
        }
        const std::size_t key_start = i;
        while (i < html.size() && !is_space(html[i]) && html[i] != '=' && html[i] != '>') ++i;
        std::string key = to_lower(html.substr(key_start, i - key_start));
        while (i < html.size() && is_space(html[i])) ++i;
        std::string value;
        if (i < html.size() && html[i] == '=') {
            ++i;
            while (i < html.size() && is_space(html[i])) ++i;
            if (i < html.size() && (html[i] == '"' || html[i] == '\'')) {
                const char quote = html[i++];
                const auto close = html.find(quote, i);
                const auto end = close == std::string_view::npos ? html.size() : close;
                value = std::string(html.substr(i, end - i));
                i = close == std::string_view::npos ? html.size() : close + 1;
            } else {
                const std::size_t v_start = i;
                while (i < html.size() && !is_space(html[i]) && html[i] != '>') ++i;
                value = std::string(html.substr(v_start, i - v_start));
            }
        }
        if (!key.empty()) tag.attrs.emplace_back(std::move(key), std::move(value));
    }
    return i < html.size() ? i + 1 : html.size();
}

// Registrable domain of an absolute or protocol-relative http(s) reference;
// std::nullopt for relative references and other schemes.
std::optional<std::string> reference_domain(std::string_view ref) {
    ref = trim(ref);
    std::string absolute;
    if (ref.starts_with("//")) {
        absolute = "http:" + std::string(ref);
    } else {
        const auto lowered = to_lower(ref.substr(0, std::min<std::size_t>(ref.size(), 8)));
        if (!lowered.starts_with("http://") && !lowered.starts_with("https://")) return std::nullopt;
        absolute = std::string(ref);
    }
    try {
        return parse_url(absolute).registrable_domain;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

bool is_external(std::string_view ref, const std::string& page_domain) {
    const auto domain = reference_domain(ref);
    return domain && *domain != page_domain;
}

std::string strip_spaces(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (!is_space(c)) out.push_back(lower(c));
    }
    return out;
}

bool is_tiny_dimension(std::string_view value) {
    const auto v = strip_spaces(value);
    return v == "0" || v == "1" || v == "0px" || v == "1px";
}

bool is_hidden(const Tag& tag) {
    if (const auto* style = tag.attr("style")) {
        const auto s = strip_spaces(*style);
        if (s.find("display:none") != std::string::npos || s.find("visibility:hidden") != std::string::npos) {
            return true;
        }
        for (std::string_view prop : {"width:", "height:"}) {
            for (auto at = s.find(prop); at != std::string::npos; at = s.find(prop, at + 1)) {
                // Skip matches inside e.g. "max-width:" or "line-height:".
                if (at > 0 && s[at - 1] != ';' && s[at - 1] != '{') continue;
                const auto start = at + prop.size();
                const auto end = s.find(';', start);
                if (is_tiny_dimension(std::string_view(s).substr(start, end == std::string::npos ? s.npos : end - start))) {
                    return true;
                }
            }
        }
    }
    for (std::string_view dim : {"width", "height"}) {
        if (const auto* v = tag.attr(dim); v && is_tiny_dimension(*v)) return true;
    }
    return false;
}

std::optional<std::string> refresh_target(std::string_view content) {
    const auto at = ifind(content, "url");
    if (at == std::string_view::npos) return std::nullopt;
    auto rest = trim(content.substr(at + 3));
    if (rest.empty() || rest.front() != '=') return std::nullopt;
    rest = trim(rest.substr(1));
    if (!rest.empty() && (rest.front() == '\'' || rest.front() == '"')) {
        const char q = rest.front();
        rest.remove_prefix(1);
        if (const auto close = rest.find(q); close != std::string_view::npos) rest = rest.substr(0, close);
    }
    return std::string(rest);
}

bool calls_function(std::string_view text, std::string_view name) {
    for (auto at = text.find(name); at != std::string_view::npos; at = text.find(name, at + 1)) {
        if (at > 0) {
            const char prev = text[at - 1];
            if (std::isalnum(static_cast<unsigned char>(prev)) || prev == '_' || prev == '$') continue;
        }
        auto i = at + name.size();
        while (i < text.size() && is_space(text[i])) ++i;
        if (i < text.size() && text[i] == '(') return true;
    }
    return false;
}

std::size_t escape_chars(std::string_view text) {
    std::size_t covered = 0;
    for (std::size_t i = 0; i + 1 < text.size(); ++i) {
        if (text[i] != '\\') continue;
        if (text[i + 1] == 'x' && i + 3 < text.size() && is_hex(text[i + 2]) && is_hex(text[i + 3])) {
            covered += 4;
            i += 3;
        } else if (text[i + 1] == 'u' && i + 5 < text.size() && is_hex(text[i + 2]) && is_hex(text[i + 3]) &&
                   is_hex(text[i + 4]) && is_hex(text[i + 5])) {
            covered += 6;
            i += 5;
        } else {
            ++i;
        }
    }
    return covered;
}

// Counts `<quote> + <quote>` joins between adjacent string literals.
std::size_t concatenations(std::string_view text) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '\'' && text[i] != '"') continue;
        std::size_t j = i + 1;
        while (j < text.size() && is_space(text[j])) ++j;
        if (j >= text.size() || text[j] != '+') continue;
        ++j;
        while (j < text.size() && is_space(text[j])) ++j;
        if (j < text.size() && (text[j] == '\'' || text[j] == '"')) {
            ++count;
            i = j - 1;
        }
    }
    return count;
}

}  // namespace

double script_obfuscation_score(std::string_view text, const ObfuscationWeights& w) {
    if (text.empty()) return 0.0;
    const double len = static_cast<double>(text.size());
    const double eval_flag = (calls_function(text, "eval") || calls_function(text, "Function")) ? 1.0 : 0.0;
    const double escape = std::min(1.0, 4.0 * static_cast<double>(escape_chars(text)) / len);
    const double concat = std::min(1.0, 50.0 * static_cast<double>(concatenations(text)) / len);
    const double entropy_flag = shannon_entropy(text) > w.entropy_threshold ? 1.0 : 0.0;
    const double score =
        w.eval_flag * eval_flag + w.escape_density * escape + w.concat_density * concat + w.entropy_flag * entropy_flag;
    return std::clamp(score, 0.0, 1.0);
}

ContentFeatures analyze_html(std::string_view html, std::string_view page_host, const ContentConfig& config) {
    ContentFeatures f;
    const std::string page_domain = registrable_domain(to_lower(page_host));
    int external_scripts = 0;
    int links = 0;
    int external_links = 0;

    std::size_t pos = 0;
    while (pos < html.size()) {
        const auto lt = html.find('<', pos);
        if (lt == std::string_view::npos) break;
        if (html.substr(lt, 4) == "<!--") {
            const auto end = html.find("-->", lt + 4);
            pos = end == std::string_view::npos ? html.size() : end + 3;
            continue;
        }
        if (lt + 1 >= html.size() || !(std::isalpha(static_cast<unsigned char>(html[lt + 1])) || html[lt + 1] == '/')) {
            pos = lt + 1;
            continue;
        }
        Tag tag;
        pos = parse_tag(html, lt, tag);
        if (tag.closing) continue;

        if (is_hidden(tag)) ++f.hidden_element_count;

        if (tag.name == "form") {
            ++f.form_count;
            if (const auto* action = tag.attr("action"); action && is_external(*action, page_domain)) {
                ++f.external_form_actions;
            }
        } else if (tag.name == "input") {
            const auto* type = tag.attr("type");
            const bool password = type && to_lower(trim(*type)) == "password";
            bool sensitive = password;
            for (std::string_view key : {"name", "id"}) {
                const auto* v = tag.attr(key);
                if (!v) continue;
                const auto lowered = to_lower(*v);
                for (const auto& kw : config.sensitive_keywords) {
                    if (lowered.find(kw) != std::string::npos) sensitive = true;
                }
            }
            if (password) ++f.password_input_count;
            if (sensitive) ++f.sensitive_input_count;
        } else if (tag.name == "script") {
            ++f.script_count;
            if (const auto* src = tag.attr("src"); src && is_external(*src, page_domain)) ++external_scripts;
            const auto close = ifind(html, "</script", pos);
            const auto body_end = close == std::string_view::npos ? html.size() : close;
            f.max_script_obfuscation =
                std::max(f.max_script_obfuscation, script_obfuscation_score(html.substr(pos, body_end - pos), config.obfuscation));
            pos = body_end;
        } else if (tag.name == "style") {
            const auto close = ifind(html, "</style", pos);
            pos = close == std::string_view::npos ? html.size() : close;
        } else if (tag.name == "iframe") {
            ++f.iframe_count;
        } else if (tag.name == "a") {
            if (const auto* href = tag.attr("href")) {
                ++links;
                if (is_external(*href, page_domain)) ++external_links;
            }
        } else if (tag.name == "meta") {
            const auto* equiv = tag.attr("http-equiv");
            if (equiv && to_lower(trim(*equiv)) == "refresh") {
                f.meta_refresh_present = true;
                if (const auto* content = tag.attr("content")) {
                    if (const auto target = refresh_target(*content); target && is_external(*target, page_domain)) {
                        f.meta_refresh_cross_origin = true;
                    }
                }
            }
        }
    }

    if (f.script_count > 0) f.external_script_ratio = static_cast<double>(external_scripts) / f.script_count;
    if (links > 0) f.external_link_ratio = static_cast<double>(external_links) / links;
    return f;
}

}  // namespace sentinel
