#include "icls/theory1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "icls/linalg.hpp"
#include "icls/parallel.hpp"

namespace icls::theory {

namespace {

constexpr double kQuadratureTolerance = 1e-12;
constexpr unsigned kQuadratureDepth = 20;
constexpr int kMaxRedraws = 1000;

double integrate(const std::function<double(double)>& f, double lo, double hi)
{
    if (!(lo < hi)) {
        return 0.0;
    }
    using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;
    return Quadrature::integrate(f, lo, hi, kQuadratureDepth, kQuadratureTolerance);
}

double normal_pdf(double z)
{
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

}  // namespace

void Distribution1D::validate() const
{
    require(ex2 > 0.0, name + ": E[X^2] must be positive");
    require(neg_xmean <= 0.0 && pos_xmean >= 0.0, name + ": half-line first moments have wrong sign");
    require(ey2 >= 0.0 && ey2 <= 1.0, name + ": P(y = 1) outside [0, 1]");
    require(exy >= neg_xmean && exy <= pos_xmean, name + ": E[XY] outside its attainable range");
}

Distribution1D uniform_sign()
{
    Distribution1D d;
    d.name = "uniform-sign";
    d.ex2 = 1.0 / 3.0;
    d.neg_xmean = -0.25;
    d.pos_xmean = 0.25;
    d.exy = 0.25;
    d.ey2 = 0.5;
    d.sampler = [](Rng& rng) {
        const double x = rng.uniform(-1.0, 1.0);
        return std::pair{x, x > 0.0 ? 1.0 : 0.0};
    };
    return d;
}

Distribution1D gaussian_mixture(double p1, double mu0, double mu1, double sigma)
{
    require(p1 > 0.0 && p1 < 1.0, "gaussian_mixture: class prior must be in (0, 1)");
    require(sigma > 0.0, "gaussian_mixture: sigma must be positive");
    const double p0 = 1.0 - p1;
    // int_0^inf x N(x; mu, s^2) dx = mu Phi(mu / s) + s phi(mu / s)
    auto positive_part = [sigma](double mu) {
        return mu * normal_cdf(mu / sigma) + sigma * normal_pdf(mu / sigma);
    };

    Distribution1D d;
    d.name = "gaussian-mixture";
    d.ex2 = p0 * (mu0 * mu0 + sigma * sigma) + p1 * (mu1 * mu1 + sigma * sigma);
    d.pos_xmean = p0 * positive_part(mu0) + p1 * positive_part(mu1);
    d.neg_xmean = (p0 * mu0 + p1 * mu1) - d.pos_xmean;
    d.exy = p1 * mu1;
    d.ey2 = p1;
    d.sampler = [p1, mu0, mu1, sigma](Rng& rng) {
        const bool positive = rng.bernoulli(p1);
        const double x = (positive ? mu1 : mu0) + sigma * rng.normal();
        return std::pair{x, positive ? 1.0 : 0.0};
    };
    return d;
}

Distribution1D from_density(std::string name, std::function<double(double)> density,
                            std::function<double(double)> posterior, double lo, double hi,
                            Sampler sampler)
{
    require(lo < hi, "from_density: empty support");
    Distribution1D d;
    d.name = std::move(name);
    // Posteriors often jump at 0, so every integral is split there.
    auto below = [&](const std::function<double(double)>& f) { return integrate(f, lo, std::min(hi, 0.0)); };
    auto above = [&](const std::function<double(double)>& f) { return integrate(f, std::max(lo, 0.0), hi); };
    auto x2 = [&](double x) { return x * x * density(x); };
    auto x1 = [&](double x) { return x * density(x); };
    auto xy = [&](double x) { return x * posterior(x) * density(x); };
    auto py = [&](double x) { return posterior(x) * density(x); };
    d.ex2 = below(x2) + above(x2);
    d.neg_xmean = below(x1);
    d.pos_xmean = above(x1);
    d.exy = below(xy) + above(xy);
    d.ey2 = below(py) + above(py);
    d.sampler = std::move(sampler);
    d.validate();
    return d;
}

Distribution1D normal_logistic(double slope)
{
    auto posterior = [slope](double x) { return 1.0 / (1.0 + std::exp(-slope * x)); };
    auto sampler = [posterior](Rng& rng) {
        const double x = rng.normal();
        return std::pair{x, rng.bernoulli(posterior(x)) ? 1.0 : 0.0};
    };
    const double inf = std::numeric_limits<double>::infinity();
    return from_density("normal-logistic", normal_pdf, posterior, -inf, inf, sampler);
}

Interval cbeta_interval(const Distribution1D& dist)
{
    require(dist.ex2 > 0.0, "cbeta_interval: E[X^2] must be positive");
    return Interval{dist.neg_xmean / dist.ex2, dist.pos_xmean / dist.ex2};
}

double true_risk_1d(double beta, const Distribution1D& dist)
{
    return beta * beta * dist.ex2 - 2.0 * beta * dist.exy + dist.ey2;
}

double optimal_beta(const Distribution1D& dist)
{
    require(dist.ex2 > 0.0, "optimal_beta: E[X^2] must be positive");
    return dist.exy / dist.ex2;
}

double fit_semi_1d(double beta_sup, const Interval& interval)
{
    require(interval.lo <= interval.hi, "fit_semi_1d: invalid interval");
    return std::clamp(beta_sup, interval.lo, interval.hi);
}

TrialResult evaluate_sample(const Distribution1D& dist, std::span<const double> x,
                            std::span<const double> y)
{
    require(x.size() == y.size() && !x.empty(), "evaluate_sample: need matching non-empty samples");
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    require(sxx > 0.0, "evaluate_sample: all feature values are zero");

    TrialResult r;
    r.beta_sup = sxy / sxx;
    r.beta_semi = fit_semi_1d(r.beta_sup, cbeta_interval(dist));
    r.risk_sup = true_risk_1d(r.beta_sup, dist);
    r.risk_semi = true_risk_1d(r.beta_semi, dist);
    return r;
}

TrialResult theorem1_trial(const Distribution1D& dist, std::size_t labeled, std::uint64_t seed)
{
    require(labeled >= 1, "theorem1_trial: need at least one labeled sample");
    require(static_cast<bool>(dist.sampler), "theorem1_trial: distribution has no sampler");
    Rng rng(seed);
    std::vector<double> x(labeled);
    std::vector<double> y(labeled);
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
        double sxx = 0.0;
        for (std::size_t i = 0; i < labeled; ++i) {
            std::tie(x[i], y[i]) = dist.sampler(rng);
            sxx += x[i] * x[i];
        }
        if (sxx > 0.0) {
            return evaluate_sample(dist, x, y);
        }
    }
    throw ContractError(dist.name + ": sampler keeps producing x = 0");
}

Theorem1Summary run_theorem1(const Distribution1D& dist, std::size_t labeled, std::size_t trials,
                             std::uint64_t master_seed, std::size_t threads)
{
    dist.validate();
    std::vector<TrialResult> results(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        results[t] = theorem1_trial(dist, labeled, derive_seed(master_seed, dist.name, labeled, t));
    });

    Theorem1Summary s;
    s.trials = trials;
    double sum = 0.0;
    for (const TrialResult& r : results) {
        const double gain = r.risk_sup - r.risk_semi;
        if (r.risk_semi <= r.risk_sup + kNeverWorseTolerance) ++s.never_worse;
        if (r.risk_semi < r.risk_sup) ++s.strictly_better;
        s.worst_violation = std::max(s.worst_violation, -gain);
        sum += gain;
    }
    if (trials > 0) {
        const auto n = static_cast<double>(trials);
        s.mean_improvement = sum / n;
        if (trials > 1) {
            double ss = 0.0;
            for (const TrialResult& r : results) {
                const double dev = (r.risk_sup - r.risk_semi) - s.mean_improvement;
                ss += dev * dev;
            }
            s.stderr_improvement = std::sqrt(ss / (n - 1.0) / n);
        }
    }
    return s;
}

}  // namespace icls::theory
