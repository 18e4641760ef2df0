#pragma once

#include <cstddef>
#include <span>

namespace icls {

struct WilcoxonResult {
    double statistic = 0.0;    // min(W+, W-)
    double w_plus = 0.0;       // rank sum of positive differences a - b
    double p_two_sided = 1.0;
    std::size_t n_used = 0;    // non-zero differences
    bool exact = true;
};

// Largest non-zero difference count for which the exact null distribution
// is enumerated; larger samples use the tie-corrected normal approximation
// with continuity correction.
inline constexpr std::size_t kWilcoxonExactLimit = 25;

// Paired signed-rank test on a - b. Zero differences are dropped and tied
// magnitudes share their average rank. The exact two-sided p-value is
// min(1, 2 min(P(W+ <= w), P(W+ >= w))) under the permutation null.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

}  // namespace icls
