#pragma once

// Seeded random streams whose output depends only on the seed: the engine is
// std::mt19937_64 (fully specified by the standard) and every variate is drawn
// with fixed arithmetic here rather than through the implementation-defined
// std:: distributions.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace icls {

std::uint64_t splitmix64(std::uint64_t x);

// Stable seed for one unit of work, e.g. (master, dataset, repeat, U).
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t a,
                          std::uint64_t b = 0);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Uniform integer in [0, n), unbiased.
    std::uint64_t below(std::uint64_t n);
    double normal();
    bool bernoulli(double p) { return uniform() < p; }

    // k distinct values from [0, n) in random order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

    template <typename T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace icls
