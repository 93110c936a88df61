#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sentinel {

struct ContentFeatures {
    int form_count = 0;
    int password_input_count = 0;
    // Password inputs plus inputs whose name/id matches a sensitive keyword.
    int sensitive_input_count = 0;
    int external_form_actions = 0;
    int script_count = 0;
    double external_script_ratio = 0.0;
    int iframe_count = 0;
    int hidden_element_count = 0;
    bool meta_refresh_present = false;
    bool meta_refresh_cross_origin = false;
    double external_link_ratio = 0.0;
    double max_script_obfuscation = 0.0;

    bool operator==(const ContentFeatures&) const = default;
};

struct ObfuscationWeights {
    double eval_flag = 0.35;
    double escape_density = 0.25;
    double concat_density = 0.20;
    double entropy_flag = 0.20;
    // Entropy (bits/char) above which the entropy flag fires.
    double entropy_threshold = 5.5;
};

struct ContentConfig {
    std::vector<std::string> sensitive_keywords{"ssn", "card", "cvv"};
    ObfuscationWeights obfuscation;
};

// Weighted sum of four indicators, clipped to [0, 1]:
//   eval_flag      1 if the text calls eval(...) or the Function constructor
//   escape_density min(1, 4 * fraction of characters inside \xHH / \uHHHH escapes)
//   concat_density min(1, 50 * string-literal concatenations / length)
//   entropy_flag   1 if Shannon entropy exceeds entropy_threshold
double script_obfuscation_score(std::string_view script_text, const ObfuscationWeights& weights = {});

// Lenient tag-soup scan; total over arbitrary input. A link, form action,
// script source or refresh target is external when its registrable domain
// differs from page_host's. Relative references are first-party.
ContentFeatures analyze_html(std::string_view html, std::string_view page_host, const ContentConfig& config = {});

}  // namespace sentinel
