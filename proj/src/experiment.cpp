#include "icls/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "icls/baselines.hpp"
#include "icls/parallel.hpp"
#include "icls/random.hpp"
#include "icls/wilcoxon.hpp"

namespace icls {

namespace {

constexpr int kMaxLabeledRedraws = 10000;

Matrix take_rows(const Matrix& x, const std::vector<std::size_t>& idx)
{
    Matrix out(static_cast<Eigen::Index>(idx.size()), x.cols());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        out.row(static_cast<Eigen::Index>(k)) = x.row(static_cast<Eigen::Index>(idx[k]));
    }
    return out;
}

Vector take(const Vector& y, const std::vector<std::size_t>& idx)
{
    Vector out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
        out(static_cast<Eigen::Index>(k)) = y(static_cast<Eigen::Index>(idx[k]));
    }
    return out;
}

// Draws `count` positions of `pool` until both classes appear among them.
// Returns (chosen, rest), each sorted.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
draw_labeled(const Vector& y, const std::vector<std::size_t>& pool, std::size_t count, Rng& rng,
             const std::string& context)
{
    if (count < 2) {
        throw DataError(context + ": at least 2 labeled objects are needed to cover both classes");
    }
    if (count > pool.size()) {
        throw DataError(context + ": cannot draw " + std::to_string(count) + " labeled objects from " +
                        std::to_string(pool.size()));
    }
    const auto positives = static_cast<std::size_t>(
        std::count_if(pool.begin(), pool.end(), [&](std::size_t i) { return y(static_cast<Eigen::Index>(i)) == 1.0; }));
    if (positives == 0 || positives == pool.size()) {
        throw DataError(context + ": training pool contains a single class");
    }

    for (int attempt = 0; attempt < kMaxLabeledRedraws; ++attempt) {
        std::vector<std::size_t> picks = rng.sample_without_replacement(pool.size(), count);
        std::size_t pos = 0;
        for (std::size_t p : picks) {
            if (y(static_cast<Eigen::Index>(pool[p])) == 1.0) ++pos;
        }
        if (pos == 0 || pos == count) {
            continue;
        }
        std::vector<bool> taken(pool.size(), false);
        std::vector<std::size_t> chosen;
        for (std::size_t p : picks) {
            taken[p] = true;
            chosen.push_back(pool[p]);
        }
        std::vector<std::size_t> rest;
        for (std::size_t p = 0; p < pool.size(); ++p) {
            if (!taken[p]) rest.push_back(pool[p]);
        }
        std::sort(chosen.begin(), chosen.end());
        return {std::move(chosen), std::move(rest)};
    }
    throw DataError(context + ": could not draw a labeled set containing both classes");
}

struct Timed {
    LinearModel model;
    double seconds = 0.0;
};

Timed timed_train(Method m, const LabeledSet& labeled, const Matrix& xu, const Vector& yu,
                  const ExperimentOptions& options)
{
    if (!options.measure_time) {
        return {train_method(m, labeled, xu, yu, options.intercept, options.qp), 0.0};
    }
    const auto start = std::chrono::steady_clock::now();
    LinearModel model = train_method(m, labeled, xu, yu, options.intercept, options.qp);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return {std::move(model), elapsed.count()};
}

std::size_t resolve_labeled(const Dataset& data, const ExperimentOptions& options)
{
    return options.labeled.value_or(auto_labeled_size(static_cast<std::size_t>(data.dim())));
}

std::string cv_stream(const std::string& dataset)
{
    return dataset + "/cv";
}

std::pair<double, double> mean_and_se(const std::vector<double>& v)
{
    if (v.empty()) {
        return {0.0, 0.0};
    }
    const auto n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    if (v.size() < 2) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

std::string_view method_name(Method m)
{
    switch (m) {
    case Method::Supervised: return "supervised";
    case Method::SelfLearning: return "self";
    case Method::Usm: return "usm";
    case Method::Icls: return "icls";
    case Method::Oracle: return "oracle";
    }
    return "unknown";
}

Method parse_method(std::string_view token)
{
    for (Method m : kAllMethods) {
        if (method_name(m) == token) {
            return m;
        }
    }
    throw ContractError("unknown method '" + std::string(token) +
                        "' (expected supervised, self, usm, icls, oracle)");
}

std::vector<Method> parse_methods(std::string_view list)
{
    std::vector<Method> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        const std::size_t end = std::min(list.find(',', start), list.size());
        const std::string_view token = list.substr(start, end - start);
        const Method m = parse_method(token);
        if (std::find(out.begin(), out.end(), m) != out.end()) {
            throw ContractError("method '" + std::string(token) + "' listed twice");
        }
        out.push_back(m);
        start = end + 1;
    }
    return out;
}

LinearModel train_method(Method m, const LabeledSet& labeled, const Matrix& x_unlabeled,
                         const Vector& y_unlabeled, bool intercept, const QpOptions& qp)
{
    switch (m) {
    case Method::Supervised: return fit_ls(labeled, intercept);
    case Method::SelfLearning: return fit_self_learning(labeled, x_unlabeled, intercept).model;
    case Method::Usm: return fit_usm(labeled, x_unlabeled);
    case Method::Icls:
        if (x_unlabeled.rows() == 0) {
            return fit_ls(labeled, intercept);
        }
        return fit_icls(labeled, x_unlabeled, intercept, qp).model;
    case Method::Oracle: return fit_oracle(labeled, x_unlabeled, y_unlabeled, intercept);
    }
    throw ContractError("unhandled method");
}

std::size_t auto_labeled_size(std::size_t dim)
{
    return std::max<std::size_t>(dim + 5, 20);
}

SplitPlan sample_split(const Dataset& data, std::optional<std::size_t> labeled, std::size_t unlabeled,
                       std::uint64_t seed)
{
    const auto n = static_cast<std::size_t>(data.size());
    const std::size_t l = labeled.value_or(auto_labeled_size(static_cast<std::size_t>(data.dim())));
    if (l + unlabeled + 1 > n) {
        throw DataError(data.name + ": L=" + std::to_string(l) + " plus U=" + std::to_string(unlabeled) +
                        " leaves no test objects among " + std::to_string(n));
    }
    Rng rng(seed);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    auto [chosen, rest] = draw_labeled(data.y, all, l, rng, data.name);

    SplitPlan plan;
    plan.labeled = std::move(chosen);
    std::vector<std::size_t> picks = rng.sample_without_replacement(rest.size(), unlabeled);
    std::vector<bool> taken(rest.size(), false);
    for (std::size_t p : picks) {
        taken[p] = true;
        plan.unlabeled.push_back(rest[p]);
    }
    std::sort(plan.unlabeled.begin(), plan.unlabeled.end());
    for (std::size_t p = 0; p < rest.size(); ++p) {
        if (!taken[p]) plan.test.push_back(rest[p]);
    }
    return plan;
}

std::vector<std::vector<std::size_t>> fold_partition(std::size_t n, std::size_t k, std::uint64_t seed)
{
    require(k >= 1 && n >= k, "fold_partition: need at least one object per fold");
    Rng rng(seed);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm);
    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t i = 0; i < n; ++i) {
        folds[i % k].push_back(perm[i]);
    }
    for (auto& f : folds) {
        std::sort(f.begin(), f.end());
    }
    return folds;
}

Evaluation evaluate(const LinearModel& model, const Matrix& x, const Vector& y)
{
    require(x.rows() == y.size() && x.rows() > 0, "evaluate: need matching non-empty test data");
    const Vector scores = model.scores(x);
    const Eigen::VectorXi labels = model.classify(x);
    Evaluation e;
    std::size_t wrong = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (static_cast<double>(labels(i)) != y(i)) ++wrong;
    }
    const auto n = static_cast<double>(y.size());
    e.error = static_cast<double>(wrong) / n;
    e.test_loss = (scores - y).squaredNorm() / n;
    return e;
}

std::vector<std::size_t> default_u_schedule()
{
    std::vector<std::size_t> s;
    for (std::size_t u = 2; u <= 1024; u *= 2) {
        s.push_back(u);
    }
    return s;
}

std::uint64_t learning_curve_seed(std::uint64_t master, const std::string& dataset, std::size_t repeat,
                                  std::size_t unlabeled)
{
    return derive_seed(master, dataset, repeat, unlabeled);
}

std::vector<RepeatResult> learning_curve(const Dataset& data, const std::vector<Method>& methods,
                                         const std::vector<std::size_t>& u_schedule, std::size_t repeats,
                                         std::uint64_t seed, const ExperimentOptions& options)
{
    data.validate();
    require(!methods.empty(), "learning_curve: no methods selected");
    require(!u_schedule.empty(), "learning_curve: empty unlabeled-size schedule");
    for (std::size_t k = 1; k < u_schedule.size(); ++k) {
        require(u_schedule[k] > u_schedule[k - 1], "learning_curve: schedule must be increasing");
    }

    const std::size_t l = resolve_labeled(data, options);
    const auto n = static_cast<std::size_t>(data.size());
    std::vector<std::size_t> feasible;
    for (std::size_t u : u_schedule) {
        if (l + u + 1 <= n) {
            feasible.push_back(u);
        } else if (options.notice) {
            options.notice(data.name + ": skipping U=" + std::to_string(u) + " (L=" + std::to_string(l) +
                           ", n=" + std::to_string(n) + " leaves no test set)");
        }
    }

    const std::size_t cells = repeats * feasible.size();
    std::vector<RepeatResult> results(cells * methods.size());
    parallel_for(cells, options.threads, [&](std::size_t cell) {
        const std::size_t repeat = cell / feasible.size();
        const std::size_t u = feasible[cell % feasible.size()];
        const std::uint64_t cell_seed = learning_curve_seed(seed, data.name, repeat, u);
        const SplitPlan plan = sample_split(data, l, u, cell_seed);

        const LabeledSet labeled = LabeledSet::make(take_rows(data.x, plan.labeled), take(data.y, plan.labeled));
        const Matrix xu = take_rows(data.x, plan.unlabeled);
        const Vector yu = take(data.y, plan.unlabeled);
        const Matrix xt = take_rows(data.x, plan.test);
        const Vector yt = take(data.y, plan.test);

        for (std::size_t m = 0; m < methods.size(); ++m) {
            const Timed fitted = timed_train(methods[m], labeled, xu, yu, options);
            const Evaluation e = evaluate(fitted.model, xt, yt);
            RepeatResult& r = results[cell * methods.size() + m];
            r.dataset = data.name;
            r.method = methods[m];
            r.labeled = l;
            r.unlabeled = u;
            r.repeat = repeat;
            r.error = e.error;
            r.test_loss = e.test_loss;
            r.train_seconds = fitted.seconds;
            r.seed = cell_seed;
        }
    });
    return results;
}

LinearModel replay_learning_curve_cell(const Dataset& data, Method method, const RepeatResult& cell,
                                       const ExperimentOptions& options)
{
    const SplitPlan plan = sample_split(data, cell.labeled, cell.unlabeled, cell.seed);
    const LabeledSet labeled = LabeledSet::make(take_rows(data.x, plan.labeled), take(data.y, plan.labeled));
    return train_method(method, labeled, take_rows(data.x, plan.unlabeled), take(data.y, plan.unlabeled),
                        options.intercept, options.qp);
}

std::vector<RepeatResult> cross_validate(const Dataset& data, const std::vector<Method>& methods,
                                         std::size_t repeats, std::uint64_t seed,
                                         const ExperimentOptions& options)
{
    data.validate();
    require(!methods.empty(), "cross_validate: no methods selected");
    const std::size_t l = resolve_labeled(data, options);
    const auto n = static_cast<std::size_t>(data.size());
    if (n < kFolds + l) {
        throw DataError(data.name + ": " + std::to_string(n) + " objects are too few for " +
                        std::to_string(kFolds) + "-fold cross-validation with L=" + std::to_string(l));
    }
    // The largest fold has ceil(n / k) objects.
    const std::size_t smallest_pool = n - (n + kFolds - 1) / kFolds;
    if (smallest_pool <= l) {
        throw DataError(data.name + ": training pools of " + std::to_string(smallest_pool) +
                        " objects leave no unlabeled data for L=" + std::to_string(l));
    }

    const std::string stream = cv_stream(data.name);
    std::vector<RepeatResult> results(repeats * methods.size());
    parallel_for(repeats, options.threads, [&](std::size_t repeat) {
        const std::uint64_t partition_seed = derive_seed(seed, stream, repeat, 0);
        const auto folds = fold_partition(n, kFolds, partition_seed);

        std::vector<std::size_t> wrong(methods.size(), 0);
        std::vector<double> sq_loss(methods.size(), 0.0);
        std::vector<double> seconds(methods.size(), 0.0);
        std::size_t unlabeled_total = 0;

        for (std::size_t f = 0; f < folds.size(); ++f) {
            std::vector<bool> in_fold(n, false);
            for (std::size_t i : folds[f]) in_fold[i] = true;
            std::vector<std::size_t> pool;
            for (std::size_t i = 0; i < n; ++i) {
                if (!in_fold[i]) pool.push_back(i);
            }
            Rng rng(derive_seed(seed, stream, repeat, f + 1));
            auto [chosen, rest] = draw_labeled(data.y, pool, l, rng, data.name);
            unlabeled_total += rest.size();

            const LabeledSet labeled = LabeledSet::make(take_rows(data.x, chosen), take(data.y, chosen));
            const Matrix xu = take_rows(data.x, rest);
            const Vector yu = take(data.y, rest);
            const Matrix xv = take_rows(data.x, folds[f]);
            const Vector yv = take(data.y, folds[f]);

            for (std::size_t m = 0; m < methods.size(); ++m) {
                const Timed fitted = timed_train(methods[m], labeled, xu, yu, options);
                const Evaluation e = evaluate(fitted.model, xv, yv);
                const auto fold_n = static_cast<double>(folds[f].size());
                wrong[m] += static_cast<std::size_t>(std::llround(e.error * fold_n));
                sq_loss[m] += e.test_loss * fold_n;
                seconds[m] += fitted.seconds;
            }
        }

        for (std::size_t m = 0; m < methods.size(); ++m) {
            RepeatResult& r = results[repeat * methods.size() + m];
            r.dataset = data.name;
            r.method = methods[m];
            r.labeled = l;
            r.unlabeled = (unlabeled_total + kFolds / 2) / kFolds;
            r.repeat = repeat;
            r.error = static_cast<double>(wrong[m]) / static_cast<double>(n);
            r.test_loss = sq_loss[m] / static_cast<double>(n);
            r.train_seconds = seconds[m];
            r.seed = partition_seed;
        }
    });
    return results;
}

std::vector<SummaryRow> summarize(const std::vector<RepeatResult>& results)
{
    struct Group {
        SummaryRow row;
        std::vector<std::size_t> members;
    };
    std::vector<Group> groups;
    std::map<std::pair<std::size_t, int>, std::size_t> index;
    std::map<std::pair<std::size_t, std::size_t>, double> supervised_error;  // (U, repeat)

    for (std::size_t i = 0; i < results.size(); ++i) {
        const RepeatResult& r = results[i];
        const auto key = std::pair{r.unlabeled, static_cast<int>(r.method)};
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, groups.size()).first;
            Group g;
            g.row.dataset = r.dataset;
            g.row.method = r.method;
            g.row.labeled = r.labeled;
            g.row.unlabeled = r.unlabeled;
            groups.push_back(std::move(g));
        }
        groups[it->second].members.push_back(i);
        if (r.method == Method::Supervised) {
            supervised_error[{r.unlabeled, r.repeat}] = r.error;
        }
    }

    std::vector<SummaryRow> rows;
    for (Group& g : groups) {
        std::vector<double> errors;
        std::vector<double> losses;
        std::vector<double> secs;
        std::vector<double> paired_method;
        std::vector<double> paired_supervised;
        std::size_t worse = 0;
        for (std::size_t i : g.members) {
            const RepeatResult& r = results[i];
            errors.push_back(r.error);
            losses.push_back(r.test_loss);
            secs.push_back(r.train_seconds);
            const auto sup = supervised_error.find({r.unlabeled, r.repeat});
            if (r.method != Method::Supervised && sup != supervised_error.end()) {
                paired_method.push_back(r.error);
                paired_supervised.push_back(sup->second);
                if (r.error > sup->second) ++worse;
            }
        }
        g.row.repeats = g.members.size();
        std::tie(g.row.mean_error, g.row.se_error) = mean_and_se(errors);
        std::tie(g.row.mean_loss, g.row.se_loss) = mean_and_se(losses);
        g.row.mean_seconds = mean_and_se(secs).first;
        if (!paired_method.empty()) {
            g.row.worse_than_supervised = worse;
            g.row.wilcoxon_p = wilcoxon_signed_rank(paired_method, paired_supervised).p_two_sided;
        }
        rows.push_back(std::move(g.row));
    }
    return rows;
}

}  // namespace icls
