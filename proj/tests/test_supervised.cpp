#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>

#include "icls/random.hpp"
#include "icls/supervised.hpp"
#include "icls/verify/oracles.hpp"

using namespace icls;

namespace {

LabeledSet two_points()
{
    Matrix x(2, 1);
    x << 1, -1;
    Vector y(2);
    y << 1, 0;
    return LabeledSet::make(x, y);
}

}  // namespace

TEST_CASE("two-point intercept model")
{
    const LinearModel m = fit_ls(two_points(), true);
    REQUIRE(m.beta.size() == 2);
    CHECK(m.beta(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m.beta(1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(risk_hat(m, two_points()) <= 1e-28);
}

TEST_CASE("all-zero labels give the zero vector")
{
    Rng rng(2);
    Matrix x(6, 2);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    const LinearModel m = fit_targets(x, Vector::Zero(6), true);
    CHECK(m.beta.isZero());
}

TEST_CASE("6x2 full-rank fits match the cofactor oracle")
{
    Rng rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        Matrix x(6, 2);
        Vector y(6);
        for (Eigen::Index i = 0; i < 6; ++i) {
            x(i, 0) = rng.normal();
            x(i, 1) = rng.normal();
            y(i) = rng.bernoulli(0.5) ? 1.0 : 0.0;
        }
        const Vector ref = verify::cofactor_normal_solve(x, y);
        const Vector beta = fit_targets(x, y, false).beta;
        CHECK((beta - ref).lpNorm<Eigen::Infinity>() <= 1e-10 * (1.0 + ref.lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("risk_hat values")
{
    LinearModel zero;
    zero.beta = Vector::Zero(1);
    zero.has_intercept = false;
    Matrix x(2, 1);
    x << 1, 2;
    Vector y(2);
    y << 1, 0;
    CHECK(risk_hat(zero, x, y) == 0.5);

    LinearModel exact;
    exact.beta = Vector::Constant(1, 2.0);
    exact.has_intercept = false;
    CHECK(risk_hat(exact, x, 2.0 * x.col(0)) == 0.0);
}

TEST_CASE("classification threshold and tie rule")
{
    const LinearModel m = fit_ls(two_points(), true);
    Matrix x(2, 1);
    x << 1, -1;
    const Eigen::VectorXi c = classify(m, x);
    CHECK(c(0) == 1);
    CHECK(c(1) == 0);
    LinearModel tie;
    tie.beta = Vector::Constant(1, 0.25);
    tie.has_intercept = false;
    const Matrix at = Matrix::Constant(1, 1, 2.0);
    CHECK(tie.scores(at)(0) == kDecisionThreshold);
    CHECK(classify(tie, at)(0) == 1);
}

TEST_CASE("fit_ls minimizes the labeled risk")
{
    Rng rng(4);
    Matrix x(30, 3);
    Vector y(30);
    for (Eigen::Index i = 0; i < 30; ++i) {
        y(i) = i % 2;
        for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = rng.normal() + y(i);
    }
    const LabeledSet data = LabeledSet::make(x, y);
    const LinearModel m = fit_ls(data, true);
    const double base = risk_hat(m, data);
    for (int k = 0; k < 100; ++k) {
        Vector delta(m.beta.size());
        for (Eigen::Index j = 0; j < delta.size(); ++j) delta(j) = rng.normal();
        delta *= 1e-3 / delta.norm();
        LinearModel moved = m;
        moved.beta += delta;
        CHECK(risk_hat(moved, data) >= base - 1e-12);
    }
}

TEST_CASE("permuting rows permutes predictions")
{
    Rng rng(5);
    Matrix x(25, 2);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    Vector y(25);
    for (Eigen::Index i = 0; i < 25; ++i) y(i) = x(i, 0) > 0 ? 1.0 : 0.0;
    const LinearModel m = fit_ls(LabeledSet::make(x, y), true);
    std::vector<std::size_t> perm(25);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    Matrix xp(25, 2);
    for (Eigen::Index i = 0; i < 25; ++i) xp.row(i) = x.row(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]));
    const Eigen::VectorXi a = m.classify(x);
    const Eigen::VectorXi b = m.classify(xp);
    for (Eigen::Index i = 0; i < 25; ++i) CHECK(b(i) == a(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)])));
}

TEST_CASE("input validation")
{
    Matrix x(2, 1);
    x << 1, 2;
    Vector y(2);
    y << 1, 2;
    CHECK_THROWS_AS(LabeledSet::make(x, y), ContractError);
    CHECK_THROWS_AS(LabeledSet::make(x, Vector::Zero(3)), ContractError);
    const LinearModel m = fit_ls(two_points(), true);
    CHECK_THROWS_AS(m.scores(Matrix::Zero(2, 3)), ContractError);
}
