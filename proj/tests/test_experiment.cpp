#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>

#include "icls/experiment.hpp"
#include "icls/random.hpp"
#include "icls/results_io.hpp"

using namespace icls;

namespace {

Dataset small_gaussians(std::size_t n, std::size_t d, std::uint64_t seed = 5)
{
    Dataset data = two_gaussians(n, d, 2.0, seed);
    data.name = "gauss";
    return data;
}

bool has_both_classes(const Dataset& data, const std::vector<std::size_t>& idx)
{
    bool zero = false, one = false;
    for (std::size_t i : idx) (data.y(static_cast<Eigen::Index>(i)) > 0.5 ? one : zero) = true;
    return zero && one;
}

}  // namespace

TEST_CASE("method tokens")
{
    for (Method m : kAllMethods) CHECK(parse_method(method_name(m)) == m);
    CHECK(parse_methods("icls,supervised") == std::vector<Method>{Method::Icls, Method::Supervised});
    CHECK_THROWS_AS(parse_methods("icls,tsvm"), ContractError);
    CHECK_THROWS_AS(parse_methods("icls,icls"), ContractError);
    CHECK_THROWS_AS(parse_methods(""), ContractError);
}

TEST_CASE("automatic labeled size")
{
    CHECK(auto_labeled_size(3) == 20);
    CHECK(auto_labeled_size(30) == 35);
    const Dataset data = small_gaussians(100, 3);
    CHECK(sample_split(data, std::nullopt, 10, 1).labeled.size() == 20);
    CHECK(sample_split(small_gaussians(100, 30), std::nullopt, 10, 1).labeled.size() == 35);
}

TEST_CASE("split plans are deterministic and seed-dependent")
{
    const Dataset data = small_gaussians(100, 3);
    const SplitPlan a = sample_split(data, 10, 20, 77);
    const SplitPlan b = sample_split(data, 10, 20, 77);
    const SplitPlan c = sample_split(data, 10, 20, 78);
    CHECK(a.labeled == b.labeled);
    CHECK(a.unlabeled == b.unlabeled);
    CHECK(a.test == b.test);
    CHECK((a.labeled != c.labeled || a.unlabeled != c.unlabeled));
}

TEST_CASE("fuzzed split plans are disjoint, complete and cover both classes")
{
    Rng rng(51);
    for (int k = 0; k < 1000; ++k) {
        const std::size_t n = 10 + rng.below(200);
        Dataset data = small_gaussians(n, 2, derive_seed(51, "fuzz-data", static_cast<std::uint64_t>(k)));
        // Skew classes sometimes so the redraw path is exercised.
        if (k % 3 == 0) {
            for (Eigen::Index i = 2; i < data.size(); ++i) data.y(i) = 0.0;
            data.y(1) = 1.0;
        }
        const std::size_t l = 2 + rng.below(std::min<std::size_t>(n - 3, 30));
        const std::size_t u = rng.below(n - l);
        const SplitPlan p = sample_split(data, l, u, derive_seed(51, "fuzz-plan", static_cast<std::uint64_t>(k)));
        CHECK(p.labeled.size() == l);
        CHECK(p.unlabeled.size() == u);
        CHECK(p.test.size() == n - l - u);
        std::set<std::size_t> all(p.labeled.begin(), p.labeled.end());
        all.insert(p.unlabeled.begin(), p.unlabeled.end());
        all.insert(p.test.begin(), p.test.end());
        CHECK(all.size() == n);
        CHECK(*all.rbegin() == n - 1);
        CHECK(has_both_classes(data, p.labeled));
    }
}

TEST_CASE("infeasible splits are rejected")
{
    const Dataset data = small_gaussians(30, 2);
    CHECK_THROWS_AS(sample_split(data, 20, 10, 1), DataError);
    CHECK_THROWS_AS(sample_split(data, 1, 5, 1), DataError);
}

TEST_CASE("fold partition")
{
    for (std::size_t n : {10, 11, 57, 306}) {
        const auto folds = fold_partition(n, kFolds, 4);
        REQUIRE(folds.size() == kFolds);
        std::vector<int> seen(n, 0);
        std::size_t lo = n, hi = 0;
        for (const auto& f : folds) {
            lo = std::min(lo, f.size());
            hi = std::max(hi, f.size());
            for (std::size_t i : f) ++seen[i];
        }
        CHECK(hi - lo <= 1);
        CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
    }
    CHECK(fold_partition(50, 10, 1) == fold_partition(50, 10, 1));
    CHECK(fold_partition(50, 10, 1) != fold_partition(50, 10, 2));
}

TEST_CASE("learning curve layout and skipped schedule entries")
{
    const Dataset data = small_gaussians(60, 2);
    std::vector<std::string> notices;
    ExperimentOptions options;
    options.notice = [&](const std::string& s) { notices.push_back(s); };
    const std::vector<Method> methods = {Method::Supervised, Method::Icls, Method::Oracle};
    const auto r = learning_curve(data, methods, {2, 8, 64}, 3, 9, options);
    CHECK(r.size() == 3 * 2 * 3);
    CHECK(notices.size() == 1);
    CHECK(r[0].repeat == 0);
    CHECK(r[0].unlabeled == 2);
    CHECK(r[0].method == Method::Supervised);
    CHECK(r[1].method == Method::Icls);
    CHECK(r[3].unlabeled == 8);
    CHECK(r.back().repeat == 2);
    for (const auto& row : r) {
        CHECK(row.labeled == 20);
        CHECK(row.train_seconds == 0.0);
        CHECK(row.seed == learning_curve_seed(9, "gauss", row.repeat, row.unlabeled));
    }
    CHECK_THROWS_AS(learning_curve(data, methods, {}, 3, 9), ContractError);
    CHECK_THROWS_AS(learning_curve(data, methods, {8, 4}, 3, 9), ContractError);
}

TEST_CASE("zero unlabeled rows make ICLS identical to supervised")
{
    Dataset data = small_gaussians(200, 3);
    // Zero out every row that could be drawn as unlabeled: all of them, then
    // the labeled rows are re-sampled from a copy with features.
    const Dataset original = data;
    ExperimentOptions options;
    options.intercept = false;
    const std::vector<Method> methods = {Method::Supervised, Method::Icls};
    for (std::size_t rep = 0; rep < 10; ++rep) {
        const std::uint64_t seed = learning_curve_seed(3, data.name, rep, 16);
        const SplitPlan plan = sample_split(original, std::nullopt, 16, seed);
        Dataset zeroed = original;
        for (std::size_t i : plan.unlabeled) zeroed.x.row(static_cast<Eigen::Index>(i)).setZero();
        const auto r = learning_curve(zeroed, methods, {16}, rep + 1, 3, options);
        const auto& sup = r[2 * rep];
        const auto& semi = r[2 * rep + 1];
        CHECK(sup.method == Method::Supervised);
        CHECK(semi.method == Method::Icls);
        CHECK(sup.error == semi.error);
        CHECK(sup.test_loss == doctest::Approx(semi.test_loss).epsilon(1e-12));
    }
}

TEST_CASE("replayed cells reproduce stored error and loss exactly")
{
    const Dataset data = small_gaussians(150, 4);
    const std::vector<Method> methods(std::begin(kAllMethods), std::end(kAllMethods));
    const auto results = learning_curve(data, methods, {4, 32}, 4, 17);
    for (const auto& cell : results) {
        const LinearModel model = replay_learning_curve_cell(data, cell.method, cell);
        const SplitPlan plan = sample_split(data, cell.labeled, cell.unlabeled, cell.seed);
        Matrix xt(static_cast<Eigen::Index>(plan.test.size()), data.dim());
        Vector yt(xt.rows());
        for (Eigen::Index i = 0; i < xt.rows(); ++i) {
            xt.row(i) = data.x.row(static_cast<Eigen::Index>(plan.test[static_cast<std::size_t>(i)]));
            yt(i) = data.y(static_cast<Eigen::Index>(plan.test[static_cast<std::size_t>(i)]));
        }
        const Evaluation e = evaluate(model, xt, yt);
        CHECK(e.error == cell.error);
        CHECK(e.test_loss == cell.test_loss);
    }
}

TEST_CASE("oracle beats ICLS on average and supervised ignores U")
{
    const Dataset data = small_gaussians(600, 5);
    const std::vector<Method> methods = {Method::Supervised, Method::Icls, Method::Oracle};
    const auto rows = summarize(learning_curve(data, methods, {32, 128}, 100, 23));
    for (std::size_t u : {32u, 128u}) {
        double icls = 0, oracle = 0;
        for (const auto& r : rows) {
            if (r.unlabeled != u) continue;
            if (r.method == Method::Icls) icls = r.mean_error;
            if (r.method == Method::Oracle) oracle = r.mean_error;
        }
        CHECK(oracle <= icls);
    }
    double sup32 = 0, sup128 = 0, se = 0;
    for (const auto& r : rows) {
        if (r.method != Method::Supervised) continue;
        (r.unlabeled == 32 ? sup32 : sup128) = r.mean_error;
        se = std::max(se, r.se_error);
    }
    CHECK(std::abs(sup32 - sup128) <= 4.0 * se);
}

TEST_CASE("cross-validation shape and counts")
{
    const Dataset data = small_gaussians(120, 3);
    const std::vector<Method> methods = {Method::Supervised, Method::SelfLearning, Method::Icls};
    const auto r = cross_validate(data, methods, 5, 2);
    REQUIRE(r.size() == 15);
    for (const auto& row : r) {
        CHECK(row.labeled == 20);
        CHECK(row.unlabeled == 88);
        CHECK(row.error >= 0.0);
        CHECK(row.error <= 1.0);
    }
    const auto rows = summarize(r);
    REQUIRE(rows.size() == 3);
    CHECK_FALSE(rows[0].worse_than_supervised.has_value());
    REQUIRE(rows[2].worse_than_supervised.has_value());
    std::size_t worse = 0;
    for (std::size_t rep = 0; rep < 5; ++rep) worse += r[3 * rep + 2].error > r[3 * rep].error;
    CHECK(*rows[2].worse_than_supervised == worse);
    CHECK_THROWS_AS(cross_validate(small_gaussians(25, 3), methods, 1, 2), DataError);
}

TEST_CASE("results do not depend on the thread count")
{
    const Dataset data = small_gaussians(200, 3);
    const std::vector<Method> methods(std::begin(kAllMethods), std::end(kAllMethods));
    ExperimentOptions one, four;
    four.threads = 4;
    CHECK(results_to_csv(learning_curve(data, methods, {2, 16}, 6, 8, one)) ==
          results_to_csv(learning_curve(data, methods, {2, 16}, 6, 8, four)));
    CHECK(results_to_csv(cross_validate(data, methods, 3, 8, one)) ==
          results_to_csv(cross_validate(data, methods, 3, 8, four)));
}
