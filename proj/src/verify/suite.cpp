#include "icls/verify/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "icls/baselines.hpp"
#include "icls/dataset.hpp"
#include "icls/experiment.hpp"
#include "icls/icls.hpp"
#include "icls/results_io.hpp"
#include "icls/theory1d.hpp"
#include "icls/verify/oracles.hpp"
#include "icls/wilcoxon.hpp"

namespace icls::verify {

namespace {

constexpr double kMembershipTolerance = 1e-8;
constexpr double kPsdTolerance = 1e-10;
constexpr double kGridSlack = 1e-3;
constexpr double kGridStep = 0.01;
constexpr double kAccelerationAgreement = 1e-8;
constexpr double kFiniteDifferenceStep = 1e-6;
constexpr double kGradientRelTolerance = 1e-5;
constexpr double kObjectiveTolerance = 1e-8;
constexpr double kMicroTolerance = 1e-6;
constexpr std::size_t kNeverWorseSizes[] = {1, 2, 5, 20};

template <typename Body>
CheckResult timed(std::string id, std::string title, Body&& body)
{
    CheckResult r;
    r.id = std::move(id);
    r.title = std::move(title);
    const auto start = std::chrono::steady_clock::now();
    body(r);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    r.seconds = elapsed.count();
    return r;
}

std::size_t uniform_size(Rng& rng, std::size_t lo, std::size_t hi)
{
    return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

std::string num(double v)
{
    std::ostringstream out;
    out << std::setprecision(4) << v;
    return out.str();
}

// Refits an ICLS solution through LU normal equations and records the gap.
void record_membership(const RandomInstance& inst, const IclsFit& fit, MembershipTally& tally)
{
    ++tally.fits;
    if (fit.y_u_star.minCoeff() < 0.0 || fit.y_u_star.maxCoeff() > 1.0) {
        tally.labels_in_box = false;
        ++tally.failures;
        return;
    }
    const Matrix xe = design_matrix(vstack(inst.labeled.x, inst.x_unlabeled), inst.intercept);
    const Vector beta = lu_normal_solve(xe, vstack(inst.labeled.y, fit.y_u_star));
    const double gap = (beta - fit.model.beta).lpNorm<Eigen::Infinity>() /
                       (1.0 + beta.lpNorm<Eigen::Infinity>());
    tally.worst_beta_gap = std::max(tally.worst_beta_gap, gap);
    if (!(gap <= kMembershipTolerance)) {
        ++tally.failures;
    }
}

// Draws sizes until X_e has full column rank for the LU oracles.
RandomInstance full_rank_instance(Rng& rng, std::size_t l, std::size_t u, std::size_t d, bool intercept)
{
    while (true) {
        RandomInstance inst = random_instance(rng, l, u, d, intercept);
        const Matrix xe = design_matrix(vstack(inst.labeled.x, inst.x_unlabeled), inst.intercept);
        Eigen::FullPivLU<Matrix> lu(xe.transpose() * xe);
        if (lu.isInvertible()) {
            return inst;
        }
    }
}

}  // namespace

CheckResult check_theorem1_never_worse(const SuiteConfig& cfg)
{
    return timed("1", "1-D never-worse: risk_semi <= risk_sup", [&](CheckResult& r) {
        const theory::Distribution1D dists[] = {theory::uniform_sign(), theory::gaussian_mixture()};
        std::size_t total = 0;
        std::size_t ok = 0;
        double worst = -1.0;
        for (const auto& dist : dists) {
            for (std::size_t l : kNeverWorseSizes) {
                const auto s = theory::run_theorem1(dist, l, cfg.theorem_trials, cfg.seed, cfg.threads);
                total += s.trials;
                ok += s.never_worse;
                worst = std::max(worst, s.worst_violation);
            }
        }
        r.passed = total > 0 && ok == total;
        r.detail = std::to_string(ok) + "/" + std::to_string(total) +
                   " trials with risk_semi <= risk_sup + 1e-12; max(risk_semi - risk_sup) = " + num(worst);
    });
}

CheckResult check_theorem1_strict(const SuiteConfig& cfg)
{
    return timed("2", "1-D strict improvement at L=1", [&](CheckResult& r) {
        const theory::Distribution1D dists[] = {theory::gaussian_mixture(), theory::normal_logistic()};
        r.passed = true;
        for (const auto& dist : dists) {
            const auto s = theory::run_theorem1(dist, 1, cfg.theorem_trials, cfg.seed, cfg.threads);
            const bool ok = s.mean_improvement > 3.0 * s.stderr_improvement && s.mean_improvement > 0.0;
            r.passed = r.passed && ok;
            if (!r.detail.empty()) r.detail += "; ";
            r.detail += dist.name + ": mean gain " + num(s.mean_improvement) + " = " +
                        num(s.stderr_improvement > 0 ? s.mean_improvement / s.stderr_improvement : 0.0) +
                        " SE, strictly better in " + std::to_string(s.strictly_better) + "/" +
                        std::to_string(s.trials) + " trials";
        }
    });
}

CheckResult check_qp_oracle(const SuiteConfig& cfg, MembershipTally& tally)
{
    return timed("3", "QP solver vs grid search (U, d <= 3)", [&](CheckResult& r) {
        Rng rng(derive_seed(cfg.seed, "qp-oracle", 0));
        std::size_t failures = 0;
        double worst_excess = -1.0;
        double worst_disagreement = 0.0;
        for (std::size_t k = 0; k < cfg.qp_oracle_instances; ++k) {
            const std::size_t d = uniform_size(rng, 1, 3);
            const std::size_t u = uniform_size(rng, 1, 3);
            const std::size_t l = uniform_size(rng, d + 2, 20);
            const bool intercept = rng.bernoulli(0.5);
            const RandomInstance inst = full_rank_instance(rng, l, u, d, intercept);

            const BoxQP qp = build_constraint_problem(inst.labeled, inst.x_unlabeled, inst.intercept);
            QpOptions plain;
            plain.accelerate = false;
            const QpResult fast = solve_box_qp(qp);
            const QpResult slow = solve_box_qp(qp, std::nullopt, plain);
            const double solver = quadratic_value(qp.q, qp.c, fast.y);
            const double grid = grid_minimum(qp.q, qp.c, kGridStep);
            const double excess = solver - grid;
            const double disagreement = std::abs(fast.objective - slow.objective);
            worst_excess = std::max(worst_excess, excess);
            worst_disagreement = std::max(worst_disagreement, disagreement);
            if (!(excess <= kGridSlack) || !(disagreement <= kAccelerationAgreement) || !fast.converged) {
                ++failures;
            }
            record_membership(inst, fit_icls(inst.labeled, inst.x_unlabeled, inst.intercept), tally);
        }
        r.passed = failures == 0;
        r.detail = std::to_string(cfg.qp_oracle_instances - failures) + "/" +
                   std::to_string(cfg.qp_oracle_instances) + " ok; max(solver - grid) = " + num(worst_excess) +
                   "; max |accelerated - projected-gradient| = " + num(worst_disagreement);
    });
}

CheckResult check_q_psd(const SuiteConfig& cfg, MembershipTally& tally)
{
    return timed("4", "Q positive semi-definite", [&](CheckResult& r) {
        Rng rng(derive_seed(cfg.seed, "psd", 0));
        double min_eig = std::numeric_limits<double>::infinity();
        std::size_t failures = 0;
        for (std::size_t k = 0; k < cfg.psd_instances; ++k) {
            const std::size_t d = uniform_size(rng, 1, 5);
            const std::size_t l = uniform_size(rng, d + 1, 50);
            const std::size_t u = uniform_size(rng, 1, 30);
            const RandomInstance inst = full_rank_instance(rng, std::max<std::size_t>(l, 2), u, d, true);
            const BoxQP qp = build_constraint_problem(inst.labeled, inst.x_unlabeled, true);
            const double e = min_eigenvalue_symmetric(qp.q);
            min_eig = std::min(min_eig, e);
            if (!(e >= -kPsdTolerance) || asymmetry(qp.q) != 0.0) {
                ++failures;
            }
            record_membership(inst, fit_icls(inst.labeled, inst.x_unlabeled, true), tally);
        }
        r.passed = failures == 0;
        r.detail = std::to_string(cfg.psd_instances - failures) + "/" + std::to_string(cfg.psd_instances) +
                   " ok; smallest eigenvalue " + num(min_eig);
    });
}

CheckResult check_gradient(const SuiteConfig& cfg, MembershipTally& tally)
{
    return timed("5", "Gradient vs central differences of the labeled risk", [&](CheckResult& r) {
        Rng rng(derive_seed(cfg.seed, "gradient", 0));
        double worst_rel = 0.0;
        double worst_objective = 0.0;
        std::size_t failures = 0;
        for (std::size_t k = 0; k < cfg.gradient_instances; ++k) {
            const std::size_t d = uniform_size(rng, 1, 5);
            const std::size_t l = uniform_size(rng, d + 2, 40);
            const std::size_t u = uniform_size(rng, 1, 15);
            const RandomInstance inst = full_rank_instance(rng, l, u, d, rng.bernoulli(0.5));
            const BoxQP qp = build_constraint_problem(inst.labeled, inst.x_unlabeled, inst.intercept);
            auto risk = [&](const Vector& yu) {
                return soft_label_risk(inst.labeled, inst.x_unlabeled, yu, inst.intercept);
            };
            for (std::size_t p = 0; p < cfg.gradient_points; ++p) {
                Vector y(static_cast<Eigen::Index>(u));
                for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = rng.uniform(0.05, 0.95);
                const Vector g = qp.q * y + qp.c;
                const Vector fd = central_difference(risk, y, kFiniteDifferenceStep);
                const double rel = (g - fd).lpNorm<Eigen::Infinity>() /
                                   std::max(g.lpNorm<Eigen::Infinity>(), 1e-8);
                const double obj_gap = std::abs(quadratic_value(qp.q, qp.c, y) + qp.constant - risk(y));
                worst_rel = std::max(worst_rel, rel);
                worst_objective = std::max(worst_objective, obj_gap);
                if (!(rel <= kGradientRelTolerance) || !(obj_gap <= kObjectiveTolerance)) {
                    ++failures;
                }
            }
            record_membership(inst, fit_icls(inst.labeled, inst.x_unlabeled, inst.intercept), tally);
        }
        r.passed = failures == 0;
        r.detail = "max relative error " + num(worst_rel) + "; max |QP objective + constant - risk| " +
                   num(worst_objective) + " over " +
                   std::to_string(cfg.gradient_instances * cfg.gradient_points) + " points";
    });
}

CheckResult check_membership(const MembershipTally& tally)
{
    return timed("6", "Membership: refit with imputed labels reproduces beta_semi", [&](CheckResult& r) {
        r.passed = tally.fits > 0 && tally.failures == 0 && tally.labels_in_box;
        r.detail = std::to_string(tally.fits - tally.failures) + "/" + std::to_string(tally.fits) +
                   " fits; worst relative beta gap " + num(tally.worst_beta_gap) +
                   (tally.labels_in_box ? "" : "; imputed labels left [0,1]");
    });
}

CheckResult check_micro_instance()
{
    return timed("7", "Hand-derived micro instance", [&](CheckResult& r) {
        Matrix x(1, 1);
        x << 1.0;
        Vector y(1);
        y << 1.0;
        Matrix xu(1, 1);
        xu << 2.0;
        const LabeledSet labeled = LabeledSet::make(x, y);

        // Brute-force scan of the labeled risk over y_u.
        double best_y = 0.0;
        double best_risk = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 1000; ++k) {
            Vector yu(1);
            yu << k / 1000.0;
            const double risk = soft_label_risk(labeled, xu, yu, false);
            if (risk < best_risk) {
                best_risk = risk;
                best_y = yu(0);
            }
        }
        const Vector beta_scan = lu_normal_solve(vstack(x, xu), vstack(y, Vector::Constant(1, best_y)));

        const BoxQP qp = build_constraint_problem(labeled, xu, false);
        const IclsFit fit = fit_icls(labeled, xu, false);
        const bool scan_ok = std::abs(best_y - 1.0) <= kMicroTolerance && std::abs(beta_scan(0) - 0.6) <= kMicroTolerance;
        const bool ok = std::abs(qp.q(0, 0) - 0.32) <= kMicroTolerance &&
                        std::abs(qp.c(0) + 0.64) <= kMicroTolerance &&
                        std::abs(fit.y_u_star(0) - 1.0) <= kMicroTolerance &&
                        std::abs(fit.model.beta(0) - 0.6) <= kMicroTolerance;
        r.passed = scan_ok && ok;
        r.detail = "scan y_u*=" + num(best_y) + " beta=" + num(beta_scan(0)) + "; Q=" + num(qp.q(0, 0)) +
                   " c=" + num(qp.c(0)) + " y_u*=" + num(fit.y_u_star(0)) + " beta_semi=" + num(fit.model.beta(0));
    });
}

CheckResult check_usm_invariance(const SuiteConfig& cfg)
{
    return timed("8", "USM label-encoding invariance", [&](CheckResult& r) {
        Rng rng(derive_seed(cfg.seed, "usm", 0));
        std::size_t failures = 0;
        std::size_t predictions = 0;
        for (std::size_t k = 0; k < cfg.usm_datasets; ++k) {
            const std::size_t d = uniform_size(rng, 1, 8);
            const std::size_t l = uniform_size(rng, 2, 40);
            const std::size_t u = uniform_size(rng, 0, 60);
            const RandomInstance inst = random_instance(rng, l, u, d, false);
            const RandomInstance test = random_instance(rng, 2, 50, d, false);
            const LabeledSet swapped =
                LabeledSet::make(inst.labeled.x, Vector(1.0 - inst.labeled.y.array()));
            const LinearModel a = fit_usm(inst.labeled, inst.x_unlabeled);
            const LinearModel b = fit_usm(swapped, inst.x_unlabeled);
            const Matrix points = vstack(vstack(inst.labeled.x, inst.x_unlabeled), test.x_unlabeled);
            const Eigen::VectorXi pa = a.classify(points);
            const Eigen::VectorXi pb = b.classify(points);
            predictions += static_cast<std::size_t>(points.rows());
            if (((pa + pb).array() != 1).any()) {
                ++failures;
            }
        }
        r.passed = failures == 0;
        r.detail = std::to_string(cfg.usm_datasets - failures) + "/" + std::to_string(cfg.usm_datasets) +
                   " datasets with exactly complementary predictions (" + std::to_string(predictions) +
                   " points)";
    });
}

CheckResult check_self_learning(const SuiteConfig& cfg)
{
    return timed("9", "Self-learning termination and fixed point", [&](CheckResult& r) {
        Rng rng(derive_seed(cfg.seed, "self-learning", 0));
        std::size_t failures = 0;
        std::size_t converged = 0;
        std::size_t max_iterations = 0;
        for (std::size_t k = 0; k < cfg.self_learning_problems; ++k) {
            const std::size_t d = uniform_size(rng, 1, 6);
            const std::size_t l = uniform_size(rng, 2, 30);
            const std::size_t u = uniform_size(rng, 1, 80);
            const RandomInstance inst = random_instance(rng, l, u, d, true);
            const SelfLearnFit fit = fit_self_learning(inst.labeled, inst.x_unlabeled, true);
            max_iterations = std::max(max_iterations, fit.iterations);
            bool ok = fit.iterations <= kSelfLearningCap;
            if (fit.converged) {
                ++converged;
                ok = ok && (fit.imputed.array() == fit.model.classify(inst.x_unlabeled).array()).all();
            }
            if (!ok) ++failures;
        }
        r.passed = failures == 0;
        r.detail = std::to_string(cfg.self_learning_problems - failures) + "/" +
                   std::to_string(cfg.self_learning_problems) + " ok; " + std::to_string(converged) +
                   " reached a fixed point; max iterations " + std::to_string(max_iterations);
    });
}

CheckResult check_wilcoxon_exact()
{
    return timed("11", "Wilcoxon exact p vs enumeration (n <= 6)", [&](CheckResult& r) {
        // Magnitude patterns: distinct, tied pairs, all tied, and one zero.
        auto magnitudes = [](std::size_t n, int kind) {
            std::vector<double> m(n);
            for (std::size_t i = 0; i < n; ++i) {
                switch (kind) {
                case 0: m[i] = static_cast<double>(i + 1); break;
                case 1: m[i] = static_cast<double>(i / 2 + 1); break;
                case 2: m[i] = 1.0; break;
                default: m[i] = static_cast<double>(i); break;
                }
            }
            return m;
        };
        std::size_t cases = 0;
        std::size_t mismatches = 0;
        for (std::size_t n = 1; n <= 6; ++n) {
            for (int kind = 0; kind < 4; ++kind) {
                const std::vector<double> mag = magnitudes(n, kind);
                for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
                    std::vector<double> a(n);
                    std::vector<double> b(n, 0.0);
                    for (std::size_t i = 0; i < n; ++i) {
                        a[i] = (mask & (std::size_t{1} << i)) ? mag[i] : -mag[i];
                    }
                    const double p = wilcoxon_signed_rank(a, b).p_two_sided;
                    const double oracle = wilcoxon_enumeration_p(a);
                    ++cases;
                    if (p != oracle) ++mismatches;
                }
            }
        }
        r.passed = mismatches == 0;
        r.detail = std::to_string(cases - mismatches) + "/" + std::to_string(cases) + " sign patterns bit-identical";
    });
}

CheckResult check_synthetic_learning_curve(const SuiteConfig& cfg)
{
    return timed("10b", "Two-Gaussian learning curve: ICLS no worse than supervised", [&](CheckResult& r) {
        const Dataset data = two_gaussians(2000, 10, 2.0, derive_seed(cfg.seed, "two-gaussians", 0));
        ExperimentOptions options;
        options.threads = cfg.threads;
        const std::vector<std::size_t> schedule = {2, 4, 8, 16, 32, 64, 128, 256};
        const auto results = learning_curve(data, {Method::Supervised, Method::Icls}, schedule,
                                            cfg.curve_repeats, cfg.seed, options);
        const auto rows = summarize(results);
        r.passed = true;
        std::ostringstream detail;
        for (std::size_t u : schedule) {
            const SummaryRow* sup = nullptr;
            const SummaryRow* semi = nullptr;
            for (const SummaryRow& row : rows) {
                if (row.unlabeled != u) continue;
                if (row.method == Method::Supervised) sup = &row;
                if (row.method == Method::Icls) semi = &row;
            }
            const bool ok = sup && semi && semi->mean_error <= sup->mean_error + semi->se_error;
            r.passed = r.passed && ok;
            if (sup && semi) {
                detail << "U=" << u << ": " << num(semi->mean_error) << " vs " << num(sup->mean_error)
                       << (ok ? "" : " (FAIL)") << "; ";
            }
        }
        r.detail = detail.str();
    });
}

CheckResult check_library_determinism(const SuiteConfig& cfg)
{
    return timed("12a", "Library outputs identical across runs and thread counts", [&](CheckResult& r) {
        const Dataset data = two_gaussians(300, 4, 2.0, derive_seed(cfg.seed, "determinism", 0));
        const std::vector<Method> methods(std::begin(kAllMethods), std::end(kAllMethods));
        ExperimentOptions one;
        ExperimentOptions many;
        many.threads = 4;
        const std::string a = results_to_csv(learning_curve(data, methods, {2, 8, 32}, 5, cfg.seed, one));
        const std::string b = results_to_csv(learning_curve(data, methods, {2, 8, 32}, 5, cfg.seed, many));
        const std::string c = results_to_jsonl(cross_validate(data, methods, 3, cfg.seed, one));
        const std::string d = results_to_jsonl(cross_validate(data, methods, 3, cfg.seed, many));
        r.passed = a == b && c == d;
        r.detail = std::string("learning curve ") + (a == b ? "identical" : "DIFFERS") + "; cross-validation " +
                   (c == d ? "identical" : "DIFFERS");
    });
}

std::vector<CheckResult> run_property_suite(const SuiteConfig& cfg, bool include_slow)
{
    std::vector<CheckResult> out;
    MembershipTally tally;
    out.push_back(check_theorem1_never_worse(cfg));
    out.push_back(check_theorem1_strict(cfg));
    out.push_back(check_qp_oracle(cfg, tally));
    out.push_back(check_q_psd(cfg, tally));
    out.push_back(check_gradient(cfg, tally));
    out.push_back(check_membership(tally));
    out.push_back(check_micro_instance());
    out.push_back(check_usm_invariance(cfg));
    out.push_back(check_self_learning(cfg));
    if (include_slow) {
        out.push_back(check_synthetic_learning_curve(cfg));
    }
    out.push_back(check_wilcoxon_exact());
    out.push_back(check_library_determinism(cfg));
    return out;
}

std::string format_check(const CheckResult& r)
{
    std::ostringstream out;
    out << (r.skipped ? "SKIP" : (r.passed ? "PASS" : "FAIL")) << "  [" << r.id << "] " << r.title << " ("
        << std::fixed << std::setprecision(2) << r.seconds << " s): " << r.detail;
    return out.str();
}

}  // namespace icls::verify
