#pragma once

// Benchmark protocols: learning curves over growing unlabeled sets and
// repeated 10-fold cross-validation, plus per-method summaries.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icls/dataset.hpp"
#include "icls/icls.hpp"
#include "icls/supervised.hpp"

namespace icls {

enum class Method { Supervised, SelfLearning, Usm, Icls, Oracle };

inline constexpr Method kAllMethods[] = {Method::Supervised, Method::SelfLearning, Method::Usm,
                                         Method::Icls, Method::Oracle};

// Tokens: supervised, self, usm, icls, oracle.
std::string_view method_name(Method m);
Method parse_method(std::string_view token);
// Comma-separated list; unknown tokens throw ContractError.
std::vector<Method> parse_methods(std::string_view list);

// Fits one learner. y_unlabeled is only read by the oracle.
LinearModel train_method(Method m, const LabeledSet& labeled, const Matrix& x_unlabeled,
                         const Vector& y_unlabeled, bool intercept, const QpOptions& qp = {});

struct SplitPlan {
    std::vector<std::size_t> labeled;
    std::vector<std::size_t> unlabeled;
    std::vector<std::size_t> test;
};

// max(d + 5, 20)
std::size_t auto_labeled_size(std::size_t dim);

// Labeled indices are drawn uniformly without replacement and redrawn until
// both classes occur; unlabeled indices come from the remainder; the rest is
// the test set. Requires L + U <= n - 1.
SplitPlan sample_split(const Dataset& data, std::optional<std::size_t> labeled, std::size_t unlabeled,
                       std::uint64_t seed);

// Random partition of [0, n) into k folds whose sizes differ by at most one.
std::vector<std::vector<std::size_t>> fold_partition(std::size_t n, std::size_t k, std::uint64_t seed);

struct Evaluation {
    double error = 0.0;      // misclassified fraction
    double test_loss = 0.0;  // mean (score - y)^2
};

Evaluation evaluate(const LinearModel& model, const Matrix& x, const Vector& y);

struct ExperimentOptions {
    bool intercept = true;
    std::optional<std::size_t> labeled;  // default auto_labeled_size(d)
    std::size_t threads = 1;
    // Wall-clock training times vary run to run; leave off for
    // byte-reproducible outputs.
    bool measure_time = false;
    QpOptions qp;
    // Receives notices such as skipped infeasible schedule entries.
    std::function<void(const std::string&)> notice;
};

struct RepeatResult {
    std::string dataset;
    Method method = Method::Supervised;
    std::size_t labeled = 0;
    std::size_t unlabeled = 0;
    std::size_t repeat = 0;
    double error = 0.0;
    double test_loss = 0.0;
    double train_seconds = 0.0;
    std::uint64_t seed = 0;
};

// 2, 4, 8, ..., 1024
std::vector<std::size_t> default_u_schedule();

// Seed of the split for (repeat, U).
std::uint64_t learning_curve_seed(std::uint64_t master, const std::string& dataset, std::size_t repeat,
                                  std::size_t unlabeled);

// For every repeat and every feasible U draws a fresh split, fits each
// method, and scores it on the test rows. Results are ordered by
// (repeat, U, method).
std::vector<RepeatResult> learning_curve(const Dataset& data, const std::vector<Method>& methods,
                                         const std::vector<std::size_t>& u_schedule, std::size_t repeats,
                                         std::uint64_t seed, const ExperimentOptions& options = {});

// Refits one learning-curve cell from its stored seed.
LinearModel replay_learning_curve_cell(const Dataset& data, Method method, const RepeatResult& cell,
                                       const ExperimentOptions& options = {});

inline constexpr std::size_t kFolds = 10;

// Per repeat: random 10-fold partition; per fold the other nine folds form
// the training pool, L labeled objects are drawn from it (both classes
// present) and the remainder is unlabeled. Predictions on all validation
// folds give one error per method per repeat. `unlabeled` holds the mean
// unlabeled count per fold, `seed` the partition seed. Ordered by
// (repeat, method).
std::vector<RepeatResult> cross_validate(const Dataset& data, const std::vector<Method>& methods,
                                         std::size_t repeats, std::uint64_t seed,
                                         const ExperimentOptions& options = {});

struct SummaryRow {
    std::string dataset;
    Method method = Method::Supervised;
    std::size_t labeled = 0;
    std::size_t unlabeled = 0;
    std::size_t repeats = 0;
    double mean_error = 0.0;
    double se_error = 0.0;
    double mean_loss = 0.0;
    double se_loss = 0.0;
    double mean_seconds = 0.0;
    // Paired against the supervised result of the same cell; absent for the
    // supervised row or when supervised was not run.
    std::optional<std::size_t> worse_than_supervised;
    std::optional<double> wilcoxon_p;
};

// Two-sided Wilcoxon p below this with a higher mean error than supervised
// marks a method as significantly worse.
inline constexpr double kSignificance = 0.01;

// Groups by (U, method) in first-appearance order.
std::vector<SummaryRow> summarize(const std::vector<RepeatResult>& results);

}  // namespace icls
