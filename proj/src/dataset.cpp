#include "sentinel/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sentinel/error.hpp"
#include "sentinel/kernels.hpp"
#include "sentinel/rng.hpp"

namespace sentinel {

std::size_t LabeledDataset::count_label(int label) const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [label](const LabeledRow& r) { return r.label == label; }));
}

void LabeledDataset::validate() const {
    std::set<std::string> seen;
    for (const auto& name : feature_names) {
        if (!seen.insert(name).second) throw Error(ErrorCode::kSchemaError, "duplicate feature name '" + name + "'");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].x.size() != feature_names.size()) {
            throw Error(ErrorCode::kSchemaError, "row " + std::to_string(i) + " has wrong width");
        }
        if (rows[i].label != 0 && rows[i].label != 1) {
            throw Error(ErrorCode::kSchemaError, "row " + std::to_string(i) + " label is not 0/1");
        }
    }
}

// --- Synthetic generator ----------------------------------------------------
//
// Each parameter is written as legit + t * (fraud - legit) where t = 0 for
// legitimate rows and t = separation for fraud rows. docs/synthetic_data.md
// lists the same table.

namespace {

int binomial(Rng& rng, int trials, double p) {
    int k = 0;
    for (int i = 0; i < trials; ++i) k += rng.bernoulli(p) ? 1 : 0;
    return k;
}

double prob(double p) { return std::clamp(p, 0.0, 1.0); }

FeatureVector synthetic_row(Rng& rng, double t) {
    using namespace feature;
    auto mix = [t](double legit, double fraud) { return legit + t * (fraud - legit); };
    FeatureVector x(kFeatureCount, 0.0);

    // URL lexical.
    x[kUrlLength] = std::max(12.0, std::round(rng.normal(mix(42, 66.75), mix(12, 18))));
    x[kHostLength] = std::max(4.0, std::round(rng.normal(mix(14, 21.5), mix(4, 6.25))));
    x[kDigitRatio] = rng.uniform(0.0, std::max(0.01, mix(0.08, 0.2075)));
    x[kCharEntropy] = std::max(0.0, rng.normal(mix(4.1, 4.3625), 0.25));
    const bool ip = rng.bernoulli(prob(mix(0.005, 0.0688)));
    x[kHostIsIp] = ip ? 1.0 : 0.0;
    if (!ip) {
        x[kSubdomainCount] = rng.poisson(mix(0.5, 1.475));
        x[kHasPunycode] = rng.bernoulli(prob(mix(0.01, 0.0475))) ? 1.0 : 0.0;
        x[kHyphenCount] = rng.poisson(mix(0.3, 1.35));
        x[kSuspiciousTld] = rng.bernoulli(prob(mix(0.03, 0.27))) ? 1.0 : 0.0;
    }
    x[kHasAtSymbol] = rng.bernoulli(prob(mix(0.005, 0.065))) ? 1.0 : 0.0;

    // Domain metadata; 10% of hosts are unknown to the provider regardless of class.
    if (rng.bernoulli(0.9)) {
        x[kDomainResolved] = 1.0;
        const bool young = rng.bernoulli(prob(mix(0.04, 0.49)));
        x[kDomainIsYoung] = young ? 1.0 : 0.0;
        x[kDomainAgeDays] = young ? std::floor(rng.uniform(1.0, 180.0))
                                  : std::max(180.0, std::round(std::exp(rng.normal(mix(7.6, 7), 0.7))));
        const bool cert = rng.bernoulli(prob(mix(0.96, 0.585)));
        x[kCertValid] = cert ? 1.0 : 0.0;
        if (cert) {
            x[kCertDaysRemaining] = std::floor(rng.uniform(5.0, std::max(6.0, mix(365, 177.5))));
        } else if (rng.bernoulli(0.5)) {
            x[kCertDaysRemaining] = -std::floor(rng.uniform(1.0, 200.0));
        }
    }

    // Page content; HTML is missing for 20% of rows.
    if (rng.bernoulli(0.8)) {
        x[kContentPresent] = 1.0;
        const int forms = rng.poisson(mix(0.8, 1.25));
        x[kFormCount] = forms;
        if (forms > 0) {
            const int passwords = rng.bernoulli(prob(mix(0.2, 0.6125))) ? 1 : 0;
            x[kPasswordInputCount] = passwords;
            x[kSensitiveInputCount] = passwords + rng.poisson(mix(0.05, 0.5));
            x[kExternalFormActions] = binomial(rng, forms, prob(mix(0.05, 0.4625)));
        }
        const int scripts = rng.poisson(mix(9, 6));
        x[kScriptCount] = scripts;
        if (scripts > 0) {
            x[kExternalScriptRatio] = prob(rng.normal(mix(0.3, 0.525), 0.15));
            x[kMaxScriptObfuscation] =
                rng.bernoulli(prob(mix(0.05, 0.425))) ? rng.uniform(0.45, 1.0) : rng.uniform(0.0, 0.3);
        }
        x[kIframeCount] = rng.poisson(mix(0.4, 1.075));
        x[kHiddenElementCount] = rng.poisson(mix(1.0, 2.35));
        const bool refresh = rng.bernoulli(prob(mix(0.03, 0.1575)));
        x[kMetaRefreshPresent] = refresh ? 1.0 : 0.0;
        x[kMetaRefreshCrossOrigin] = refresh && rng.bernoulli(prob(mix(0.15, 0.6375))) ? 1.0 : 0.0;
        x[kExternalLinkRatio] = prob(rng.normal(mix(0.25, 0.5125), 0.15));
    }

    // Session behaviour; observed for half of the rows.
    if (rng.bernoulli(0.5)) {
        const int redirects = rng.poisson(mix(0.3, 1.65));
        x[kRedirectChainLength] = redirects;
        x[kCrossOriginHops] = binomial(rng, redirects, prob(mix(0.3, 0.675)));
        x[kRapidRedirectCount] = binomial(rng, redirects, prob(mix(0.1, 0.55)));
        x[kThirdPartyRequestRatio] = prob(rng.normal(mix(0.25, 0.475), 0.15));
        x[kUniqueThirdPartyDomains] = rng.poisson(mix(4, 6.25));
        x[kExternalFormSubmit] = rng.bernoulli(prob(mix(0.02, 0.2825))) ? 1.0 : 0.0;
        x[kSensitiveFieldFocusCount] = rng.poisson(mix(0.3, 1.2));
        x[kHiddenRedirectFlag] = redirects > 0 && rng.bernoulli(prob(mix(0.05, 0.5))) ? 1.0 : 0.0;
    }
    return x;
}

}  // namespace

LabeledDataset generate_synthetic(std::size_t n, double fraud_ratio, double separation, std::uint64_t seed) {
    if (n < 10) throw Error(ErrorCode::kInvalidConfig, "synthetic dataset needs n >= 10");
    if (!(fraud_ratio > 0.0 && fraud_ratio < 1.0)) {
        throw Error(ErrorCode::kInvalidConfig, "fraud_ratio must lie in (0, 1)");
    }
    if (!(separation >= 0.0) || !std::isfinite(separation)) {
        throw Error(ErrorCode::kInvalidConfig, "separation must be finite and >= 0");
    }
    const auto fraud = static_cast<std::size_t>(std::llround(static_cast<double>(n) * fraud_ratio));

    Rng rng(seed);
    std::vector<int> labels(n, 0);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(fraud), 1);
    rng.shuffle(labels);

    LabeledDataset ds;
    ds.feature_names = default_manifest();
    ds.provenance = Provenance::kSynthetic;
    ds.rows.reserve(n);
    for (int label : labels) ds.rows.push_back({synthetic_row(rng, label == 1 ? separation : 0.0), label});
    return ds;
}

// --- CSV ---------------------------------------------------------------------

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string_view strip(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    return s;
}

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

LabeledDataset parse_csv(std::string_view text, const std::string& source_name) {
    LabeledDataset ds;
    ds.provenance = Provenance::kCsv;

    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line = strip(text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (line.empty()) continue;

        const auto fields = split_fields(line);
        if (!header_seen) {
            header_seen = true;
            if (fields.size() < 2 || strip(fields.back()) != "label") {
                throw Error(ErrorCode::kSchemaError, source_name + ": header must end with a 'label' column");
            }
            for (std::size_t i = 0; i + 1 < fields.size(); ++i) ds.feature_names.emplace_back(strip(fields[i]));
            continue;
        }
        if (fields.size() != ds.feature_names.size() + 1) {
            throw Error(ErrorCode::kParseError, source_name + ": row " + std::to_string(line_no) + " has " +
                                                    std::to_string(fields.size()) + " columns, expected " +
                                                    std::to_string(ds.feature_names.size() + 1));
        }
        LabeledRow row;
        row.x.reserve(ds.feature_names.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const auto cell = strip(fields[c]);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            const std::string column = c < ds.feature_names.size() ? ds.feature_names[c] : "label";
            if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
                throw Error(ErrorCode::kParseError, source_name + ": row " + std::to_string(line_no) + ", column '" +
                                                        column + "': '" + std::string(cell) + "' is not a finite number");
            }
            if (c + 1 == fields.size()) {
                if (v != 0.0 && v != 1.0) {
                    throw Error(ErrorCode::kSchemaError, source_name + ": row " + std::to_string(line_no) +
                                                             " label must be 0 or 1, got '" + std::string(cell) + "'");
                }
                row.label = static_cast<int>(v);
            } else {
                row.x.push_back(v);
            }
        }
        ds.rows.push_back(std::move(row));
    }
    if (!header_seen) throw Error(ErrorCode::kSchemaError, source_name + ": missing header row");
    ds.validate();
    return ds;
}

LabeledDataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path.string());
}

std::string to_csv(const LabeledDataset& ds) {
    std::string out;
    for (const auto& name : ds.feature_names) out += name + ",";
    out += "label\n";
    for (const auto& row : ds.rows) {
        for (double v : row.x) out += format_number(v) + ",";
        out += std::to_string(row.label) + "\n";
    }
    return out;
}

void write_csv(const LabeledDataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
    out << to_csv(ds);
    if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

// --- Splitting and resampling ---------------------------------------------------

namespace {

LabeledDataset with_rows(const LabeledDataset& ds, const std::vector<std::size_t>& indices) {
    LabeledDataset out;
    out.feature_names = ds.feature_names;
    out.provenance = ds.provenance;
    out.rows.reserve(indices.size());
    for (auto i : indices) out.rows.push_back(ds.rows[i]);
    return out;
}

std::vector<std::size_t> indices_of(const LabeledDataset& ds, int label) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
        if (ds.rows[i].label == label) idx.push_back(i);
    }
    return idx;
}

}  // namespace

std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& ds, double test_fraction,
                                                           std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw Error(ErrorCode::kInvalidConfig, "test_fraction must lie in (0, 1)");
    }
    Rng rng(seed);
    std::vector<bool> in_test(ds.rows.size(), false);
    for (int label : {0, 1}) {
        auto idx = indices_of(ds, label);
        if (idx.size() < 2) {
            throw Error(ErrorCode::kInvalidConfig, "class " + std::to_string(label) + " needs at least 2 rows to split");
        }
        rng.shuffle(idx);
        auto take = static_cast<std::size_t>(std::llround(static_cast<double>(idx.size()) * test_fraction));
        take = std::clamp<std::size_t>(take, 1, idx.size() - 1);
        for (std::size_t i = 0; i < take; ++i) in_test[idx[i]] = true;
    }
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (std::size_t i = 0; i < ds.rows.size(); ++i) (in_test[i] ? test_idx : train_idx).push_back(i);
    return {with_rows(ds, train_idx), with_rows(ds, test_idx)};
}

Normalizer::Normalizer(std::vector<double> min, std::vector<double> max) : min_(std::move(min)), max_(std::move(max)) {
    if (min_.size() != max_.size()) throw Error(ErrorCode::kDimensionMismatch, "normalizer min/max widths differ");
    for (std::size_t i = 0; i < min_.size(); ++i) {
        if (!(min_[i] <= max_[i])) throw Error(ErrorCode::kInvalidConfig, "normalizer min > max at feature " + std::to_string(i));
    }
}

Normalizer Normalizer::fit(const LabeledDataset& train) {
    if (train.rows.empty()) throw Error(ErrorCode::kInvalidConfig, "cannot fit a normalizer on an empty dataset");
    std::vector<double> lo = train.rows.front().x;
    std::vector<double> hi = lo;
    for (const auto& row : train.rows) {
        for (std::size_t i = 0; i < lo.size(); ++i) {
            lo[i] = std::min(lo[i], row.x[i]);
            hi[i] = std::max(hi[i], row.x[i]);
        }
    }
    return Normalizer(std::move(lo), std::move(hi));
}

FeatureVector Normalizer::apply(const FeatureVector& x) const {
    if (x.size() != min_.size()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "vector has " + std::to_string(x.size()) + " features, normalizer expects " + std::to_string(min_.size()));
    }
    FeatureVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double range = max_[i] - min_[i];
        out[i] = range > 0.0 ? std::clamp((x[i] - min_[i]) / range, 0.0, 1.0) : 0.5;
    }
    return out;
}

LabeledDataset Normalizer::apply(const LabeledDataset& ds) const {
    LabeledDataset out;
    out.feature_names = ds.feature_names;
    out.provenance = ds.provenance;
    out.rows.reserve(ds.rows.size());
    for (const auto& row : ds.rows) out.rows.push_back({apply(row.x), row.label});
    return out;
}

LabeledDataset random_undersample(const LabeledDataset& ds, std::uint64_t seed) {
    auto legit = indices_of(ds, 0);
    auto fraud = indices_of(ds, 1);
    if (legit.empty() || fraud.empty()) throw Error(ErrorCode::kInvalidConfig, "undersampling needs both classes");
    auto& majority = legit.size() >= fraud.size() ? legit : fraud;
    const auto& minority = legit.size() >= fraud.size() ? fraud : legit;

    Rng rng(seed);
    rng.shuffle(majority);
    majority.resize(minority.size());

    std::vector<std::size_t> keep = minority;
    keep.insert(keep.end(), majority.begin(), majority.end());
    std::sort(keep.begin(), keep.end());
    return with_rows(ds, keep);
}

LabeledDataset smote(const LabeledDataset& ds, int k, std::uint64_t seed) {
    if (k < 1) throw Error(ErrorCode::kInvalidConfig, "SMOTE k must be >= 1");
    const auto legit = indices_of(ds, 0);
    const auto fraud = indices_of(ds, 1);
    const bool fraud_minority = fraud.size() <= legit.size();
    const auto& minority = fraud_minority ? fraud : legit;
    const auto& majority = fraud_minority ? legit : fraud;
    if (minority.size() < 2) throw Error(ErrorCode::kInvalidConfig, "SMOTE needs at least 2 minority rows");

    std::vector<std::vector<double>> points;
    points.reserve(minority.size());
    for (auto i : minority) points.push_back(ds.rows[i].x);
    const auto neighbors = kernels::k_nearest(points, static_cast<std::size_t>(k), kernels::Exec::kParallel);

    LabeledDataset out = ds;
    const int minority_label = fraud_minority ? 1 : 0;
    Rng rng(seed);
    for (std::size_t made = minority.size(); made < majority.size(); ++made) {
        const auto base = rng.below(points.size());
        const auto& nbrs = neighbors[base];
        const auto& other = points[nbrs[rng.below(nbrs.size())]];
        const double u = rng.uniform();
        FeatureVector x(points[base].size());
        for (std::size_t c = 0; c < x.size(); ++c) x[c] = points[base][c] + u * (other[c] - points[base][c]);
        out.rows.push_back({std::move(x), minority_label});
    }
    return out;
}

}  // namespace sentinel
