#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace sentinel {

// Seeded generator with distribution helpers defined here rather than via
// <random> distributions, whose algorithms differ between standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

    bool bernoulli(double p) { return uniform() < p; }

    double normal(double mean, double stddev) {
        // Box-Muller; the second variate is discarded to keep the stream position simple.
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        return mean + stddev * z;
    }

    int poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        const double limit = std::exp(-lambda);
        double product = uniform();
        int k = 0;
        while (product > limit) {
            ++k;
            product *= uniform();
        }
        return k;
    }

    template <class Container>
    void shuffle(Container& c) {
        for (std::size_t i = c.size(); i > 1; --i) {
            std::swap(c[i - 1], c[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// Derives an independent stream seed for sub-task `index` (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace sentinel
