#pragma once

// One-dimensional, no-intercept setting with a known feature density.
//
// With f_X known, every soft labeling E[y|x] in [0,1] yields
//     beta = E[X E[y|x]] / E[X^2],
// so the constraint set is the interval
//     [ int_{-inf}^0 x f_X dx / E[X^2],  int_0^inf x f_X dx / E[X^2] ]
// and the semi-supervised estimate is the supervised one clipped to it.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>

#include "icls/random.hpp"

namespace icls::theory {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const { return lo <= v && v <= hi; }
};

// Draws one (x, y) pair with y in {0, 1}.
using Sampler = std::function<std::pair<double, double>(Rng&)>;

struct Distribution1D {
    std::string name;
    double ex2 = 0.0;        // E[X^2]
    double neg_xmean = 0.0;  // int_{-inf}^0 x f_X(x) dx
    double pos_xmean = 0.0;  // int_0^inf x f_X(x) dx
    double exy = 0.0;        // E[XY]
    double ey2 = 0.0;        // E[Y^2] = P(y = 1)
    Sampler sampler;

    // Throws ContractError when a moment invariant fails.
    void validate() const;
};

// X ~ U[-1, 1], y = 1{x > 0}.
Distribution1D uniform_sign();

// y ~ Bernoulli(p1), X | y ~ N(mu_y, sigma^2). Continuous in x with
// f_{X,Y}(0, 1) > 0.
Distribution1D gaussian_mixture(double p1 = 0.5, double mu0 = -1.0, double mu1 = 1.0,
                                double sigma = 1.0);

// Moments by adaptive Gauss-Kronrod quadrature of the given density and
// posterior P(y = 1 | x) over [lo, hi] (infinite bounds allowed).
Distribution1D from_density(std::string name, std::function<double(double)> density,
                            std::function<double(double)> posterior, double lo, double hi,
                            Sampler sampler);

// X ~ N(0, 1), P(y = 1 | x) = 1 / (1 + exp(-slope x)); moments by quadrature.
Distribution1D normal_logistic(double slope = 2.0);

Interval cbeta_interval(const Distribution1D& dist);

// beta^2 E[X^2] - 2 beta E[XY] + E[Y^2]
double true_risk_1d(double beta, const Distribution1D& dist);

// Risk minimizer E[XY] / E[X^2].
double optimal_beta(const Distribution1D& dist);

// Clips beta_sup into the interval.
double fit_semi_1d(double beta_sup, const Interval& interval);

struct TrialResult {
    double risk_sup = 0.0;
    double risk_semi = 0.0;
    double beta_sup = 0.0;
    double beta_semi = 0.0;
};

// Evaluates both estimators on a fixed labeled sample.
TrialResult evaluate_sample(const Distribution1D& dist, std::span<const double> x,
                            std::span<const double> y);

// Draws L labeled pairs (redrawing if sum x^2 == 0) and evaluates them.
TrialResult theorem1_trial(const Distribution1D& dist, std::size_t labeled, std::uint64_t seed);

struct Theorem1Summary {
    std::size_t trials = 0;
    std::size_t never_worse = 0;      // risk_semi <= risk_sup + tolerance
    std::size_t strictly_better = 0;  // risk_semi < risk_sup
    double mean_improvement = 0.0;    // mean(risk_sup - risk_semi)
    double stderr_improvement = 0.0;
    double worst_violation = -std::numeric_limits<double>::infinity();  // max(risk_semi - risk_sup)

    double fraction_never_worse() const
    {
        return trials == 0 ? 0.0 : static_cast<double>(never_worse) / static_cast<double>(trials);
    }
};

inline constexpr double kNeverWorseTolerance = 1e-12;

// Trial t uses seed derive_seed(master, dist.name, labeled, t), so results do
// not depend on the thread count.
Theorem1Summary run_theorem1(const Distribution1D& dist, std::size_t labeled, std::size_t trials,
                             std::uint64_t master_seed, std::size_t threads = 1);

}  // namespace icls::theory
