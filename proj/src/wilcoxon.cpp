#include "icls/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "icls/linalg.hpp"

namespace icls {

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b)
{
    require(a.size() == b.size(), "wilcoxon: samples must have equal length");
    require(!a.empty(), "wilcoxon: samples are empty");

    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        require(std::isfinite(d), "wilcoxon: non-finite difference");
        if (d != 0.0) {
            diffs.push_back(d);
        }
    }

    WilcoxonResult result;
    const std::size_t n = diffs.size();
    result.n_used = n;
    if (n == 0) {
        return result;
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return std::abs(diffs[i]) < std::abs(diffs[j]); });

    // Doubled ranks are integers even with ties: positions i..j share i + j.
    std::vector<std::uint64_t> rank2(n);
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) {
            ++j;
        }
        const std::uint64_t shared = (i + 1) + (j + 1);
        for (std::size_t k = i; k <= j; ++k) {
            rank2[order[k]] = shared;
        }
        const auto t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }

    std::uint64_t w2_plus = 0;
    std::uint64_t total2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total2 += rank2[i];
        if (diffs[i] > 0.0) w2_plus += rank2[i];
    }
    result.w_plus = static_cast<double>(w2_plus) / 2.0;
    result.statistic = static_cast<double>(std::min(w2_plus, total2 - w2_plus)) / 2.0;

    if (n <= kWilcoxonExactLimit) {
        // counts[s]: sign assignments whose positive doubled-rank sum is s.
        std::vector<std::uint64_t> counts(total2 + 1, 0);
        counts[0] = 1;
        std::uint64_t reach = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::uint64_t s = reach + 1; s-- > 0;) {
                if (counts[s] != 0) counts[s + rank2[i]] += counts[s];
            }
            reach += rank2[i];
        }
        std::uint64_t le = 0;
        std::uint64_t ge = 0;
        for (std::uint64_t s = 0; s <= total2; ++s) {
            if (s <= w2_plus) le += counts[s];
            if (s >= w2_plus) ge += counts[s];
        }
        const double all = std::ldexp(1.0, static_cast<int>(n));
        result.p_two_sided = std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / all);
        result.exact = true;
        return result;
    }

    const auto nd = static_cast<double>(n);
    const double mean = nd * (nd + 1.0) / 4.0;
    const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
    result.exact = false;
    if (var <= 0.0) {
        result.p_two_sided = 1.0;
        return result;
    }
    const double dev = result.w_plus - mean;
    const double corrected = dev > 0.0 ? dev - 0.5 : (dev < 0.0 ? dev + 0.5 : 0.0);
    const double z = corrected / std::sqrt(var);
    result.p_two_sided = std::min(1.0, std::erfc(std::abs(z) / std::numbers::sqrt2));
    return result;
}

}  // namespace icls
