#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "sentinel/manifest.hpp"

namespace sentinel {

enum class Provenance { kSynthetic, kCsv };

struct LabeledRow {
    FeatureVector x;
    int label = 0;  // 0 = legitimate, 1 = fraud

    bool operator==(const LabeledRow&) const = default;
};

struct LabeledDataset {
    std::vector<std::string> feature_names;
    std::vector<LabeledRow> rows;
    Provenance provenance = Provenance::kSynthetic;

    std::size_t dim() const { return feature_names.size(); }
    std::size_t size() const { return rows.size(); }
    std::size_t count_label(int label) const;
    // Throws Error{kSchemaError} on any broken invariant.
    void validate() const;
};

inline constexpr double kDefaultSeparation = 1.0;

// Rows follow a legit/fraud parameter table interpolated by `separation`
// (0 makes the classes identical). Exactly round(n * fraud_ratio) fraud rows.
LabeledDataset generate_synthetic(std::size_t n, double fraud_ratio, double separation, std::uint64_t seed);

LabeledDataset load_csv(const std::filesystem::path& path);
LabeledDataset parse_csv(std::string_view text, const std::string& source_name = "<memory>");
std::string to_csv(const LabeledDataset& ds);
void write_csv(const LabeledDataset& ds, const std::filesystem::path& path);

std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& ds, double test_fraction,
                                                           std::uint64_t seed);

class Normalizer {
public:
    Normalizer() = default;
    Normalizer(std::vector<double> min, std::vector<double> max);

    static Normalizer fit(const LabeledDataset& train);

    // (x - min) / (max - min) clipped to [0, 1]; constant features map to 0.5.
    FeatureVector apply(const FeatureVector& x) const;
    LabeledDataset apply(const LabeledDataset& ds) const;

    const std::vector<double>& min() const { return min_; }
    const std::vector<double>& max() const { return max_; }
    std::size_t dim() const { return min_.size(); }

private:
    std::vector<double> min_;
    std::vector<double> max_;
};

LabeledDataset random_undersample(const LabeledDataset& ds, std::uint64_t seed);

// Appends synthetic minority rows until both classes have equal counts.
LabeledDataset smote(const LabeledDataset& ds, int k, std::uint64_t seed);

}  // namespace sentinel
