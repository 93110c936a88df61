#pragma once

// Data-parallel hot loops. Every kernel has a serial reference path and an
// OpenMP path that must produce bit-identical results; tests compare the two
// and bench/ times them.

#include <cstddef>
#include <span>
#include <vector>

namespace sentinel::kernels {

enum class Exec { kSerial, kParallel };

// Dense column-major matrix: value(r, c) = values[c * rows + r].
struct ColumnMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    double operator()(std::size_t r, std::size_t c) const { return values[c * rows + r]; }
    std::span<const double> column(std::size_t c) const { return {values.data() + c * rows, rows}; }

    static ColumnMatrix from_rows(std::span<const std::vector<double>> rows, std::size_t cols);
};

enum class Criterion {
    kGini,      // binary targets in {0, 1}
    kVariance,  // real targets, sum of squared errors
};

struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

// Gains within this distance of the best are ties.
inline constexpr double kGainTieTolerance = 1e-12;

// Impurity decrease of splitting a node (per-sample normalized, so Gini and
// variance gains are comparable to the textbook definitions).
double gini_impurity(double positives, double n);

// Best axis-aligned split of `samples` over `features`. Candidate thresholds
// are midpoints between consecutive distinct values; both children must hold
// at least min_samples_leaf samples. Among candidates whose gain is within
// kGainTieTolerance of the maximum, the lowest feature index wins, then the
// lowest threshold.
Split best_split(const ColumnMatrix& x, std::span<const double> y, std::span<const std::size_t> samples,
                 std::span<const std::size_t> features, Criterion criterion, std::size_t min_samples_leaf,
                 Exec exec = Exec::kSerial);

// For each point, the indices of its k nearest other points by Euclidean
// distance, nearest first; ties broken by lower index. k is capped at n - 1.
std::vector<std::vector<std::size_t>> k_nearest(std::span<const std::vector<double>> points, std::size_t k,
                                                Exec exec = Exec::kSerial);

// Threads available to the parallel path (1 when built without OpenMP).
int max_threads();

}  // namespace sentinel::kernels
