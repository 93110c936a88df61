#include "sentinel/kernels.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sentinel::kernels {

namespace {

struct Candidate {
    double threshold;
    double gain;
};

double sse(double sum, double sum_sq, double n) { return n > 0 ? sum_sq - sum * sum / n : 0.0; }

// All valid candidates of one feature, ascending by threshold.
std::vector<Candidate> feature_candidates(const ColumnMatrix& x, std::span<const double> y,
                                          std::span<const std::size_t> samples, std::size_t feature,
                                          Criterion criterion, std::size_t min_leaf) {
    const std::size_t n = samples.size();
    std::vector<std::pair<double, double>> points(n);
    const auto column = x.column(feature);
    for (std::size_t i = 0; i < n; ++i) points[i] = {column[samples[i]], y[samples[i]]};
    std::sort(points.begin(), points.end());

    double total = 0.0;
    double total_sq = 0.0;
    for (const auto& p : points) {
        total += p.second;
        total_sq += p.second * p.second;
    }
    const double nd = static_cast<double>(n);
    const double parent =
        criterion == Criterion::kGini ? gini_impurity(total, nd) : sse(total, total_sq, nd) / nd;

    std::vector<Candidate> out;
    double left = 0.0;
    double left_sq = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        left += points[i].second;
        left_sq += points[i].second * points[i].second;
        const double a = points[i].first;
        const double b = points[i + 1].first;
        if (!(a < b)) continue;
        const std::size_t nl = i + 1;
        const std::size_t nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double nld = static_cast<double>(nl);
        const double nrd = static_cast<double>(nr);
        double gain;
        if (criterion == Criterion::kGini) {
            gain = parent - (nld / nd) * gini_impurity(left, nld) - (nrd / nd) * gini_impurity(total - left, nrd);
        } else {
            gain = parent - (sse(left, left_sq, nld) + sse(total - left, total_sq - left_sq, nrd)) / nd;
        }
        double threshold = a + (b - a) / 2.0;
        if (!(threshold < b)) threshold = a;
        out.push_back({threshold, gain});
    }
    return out;
}

Split select(const std::vector<std::vector<Candidate>>& per_feature, std::span<const std::size_t> features) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& cands : per_feature) {
        for (const auto& c : cands) best = std::max(best, c.gain);
    }
    Split split;
    for (std::size_t f = 0; f < per_feature.size() && !split.found; ++f) {
        for (const auto& c : per_feature[f]) {
            if (c.gain >= best - kGainTieTolerance) {
                split = {true, features[f], c.threshold, c.gain};
                break;
            }
        }
    }
    return split;
}

}  // namespace

ColumnMatrix ColumnMatrix::from_rows(std::span<const std::vector<double>> rows, std::size_t cols) {
    ColumnMatrix m;
    m.rows = rows.size();
    m.cols = cols;
    m.values.resize(m.rows * cols);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) m.values[c * m.rows + r] = rows[r][c];
    }
    return m;
}

double gini_impurity(double positives, double n) {
    if (n <= 0) return 0.0;
    const double p1 = positives / n;
    const double p0 = 1.0 - p1;
    return 1.0 - p1 * p1 - p0 * p0;
}

Split best_split(const ColumnMatrix& x, std::span<const double> y, std::span<const std::size_t> samples,
                 std::span<const std::size_t> features, Criterion criterion, std::size_t min_samples_leaf,
                 Exec exec) {
    const std::size_t min_leaf = std::max<std::size_t>(1, min_samples_leaf);
    std::vector<std::vector<Candidate>> per_feature(features.size());
    const auto nf = static_cast<std::ptrdiff_t>(features.size());
    if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t f = 0; f < nf; ++f) {
            per_feature[f] = feature_candidates(x, y, samples, features[f], criterion, min_leaf);
        }
    } else {
        for (std::ptrdiff_t f = 0; f < nf; ++f) {
            per_feature[f] = feature_candidates(x, y, samples, features[f], criterion, min_leaf);
        }
    }
    return select(per_feature, features);
}

std::vector<std::vector<std::size_t>> k_nearest(std::span<const std::vector<double>> points, std::size_t k,
                                                Exec exec) {
    const std::size_t n = points.size();
    if (n == 0) return {};
    k = std::min(k, n - 1);
    std::vector<std::vector<std::size_t>> out(n);

    auto neighbors_of = [&](std::size_t i) {
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double d = 0.0;
            for (std::size_t c = 0; c < points[i].size(); ++c) {
                const double diff = points[i][c] - points[j][c];
                d += diff * diff;
            }
            dist.emplace_back(d, j);
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        std::vector<std::size_t> idx(k);
        for (std::size_t m = 0; m < k; ++m) idx[m] = dist[m].second;
        return idx;
    };

    const auto nn = static_cast<std::ptrdiff_t>(n);
    if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < nn; ++i) out[i] = neighbors_of(static_cast<std::size_t>(i));
    } else {
        for (std::ptrdiff_t i = 0; i < nn; ++i) out[i] = neighbors_of(static_cast<std::size_t>(i));
    }
    return out;
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace sentinel::kernels
