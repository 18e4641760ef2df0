#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "icls/icls.hpp"
#include "icls/random.hpp"
#include "icls/verify/oracles.hpp"

using namespace icls;

namespace {

LabeledSet one_point()
{
    return LabeledSet::make(Matrix::Constant(1, 1, 1.0), Vector::Constant(1, 1.0));
}

BoxQP make_qp(Matrix q, Vector c)
{
    BoxQP qp;
    qp.q = std::move(q);
    qp.c = std::move(c);
    return qp;
}

}  // namespace

TEST_CASE("micro instance constraint problem")
{
    const BoxQP qp = build_constraint_problem(one_point(), Matrix::Constant(1, 1, 2.0), false);
    CHECK(qp.q(0, 0) == doctest::Approx(0.32).epsilon(1e-12));
    CHECK(qp.c(0) == doctest::Approx(-0.64).epsilon(1e-12));
    // Risk at y_u = 0: beta = 1/5, residual 0.8.
    CHECK(qp.constant == doctest::Approx(0.64).epsilon(1e-12));
}

TEST_CASE("zero unlabeled rows contribute nothing")
{
    Rng rng(21);
    auto inst = verify::random_instance(rng, 12, 4, 3, false);
    inst.x_unlabeled.row(1).setZero();
    inst.x_unlabeled.row(3).setZero();
    const BoxQP qp = build_constraint_problem(inst.labeled, inst.x_unlabeled, false);
    for (Eigen::Index k : {1, 3}) {
        CHECK(qp.q.row(k).isZero());
        CHECK(qp.q.col(k).isZero());
        CHECK(qp.c(k) == 0.0);
    }
}

TEST_CASE("Q is exactly symmetric and has a factor")
{
    Rng rng(22);
    for (int rep = 0; rep < 20; ++rep) {
        const auto inst = verify::random_instance(rng, 15, 7, 3, true);
        const BoxQP qp = build_constraint_problem(inst.labeled, inst.x_unlabeled, true);
        CHECK(asymmetry(qp.q) == 0.0);
        REQUIRE(qp.factor.has_value());
        const Matrix ff = *qp.factor * qp.factor->transpose();
        CHECK((ff - qp.q).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
}

TEST_CASE("QP objective plus constant equals the labeled risk")
{
    Rng rng(23);
    for (int rep = 0; rep < 20; ++rep) {
        const auto inst = verify::random_instance(rng, 10, 5, 2, rep % 2 == 0);
        const BoxQP qp = build_constraint_problem(inst.labeled, inst.x_unlabeled, inst.intercept);
        Vector y(5);
        for (Eigen::Index i = 0; i < 5; ++i) y(i) = rng.uniform();
        const double direct = verify::soft_label_risk(inst.labeled, inst.x_unlabeled, y, inst.intercept);
        CHECK(std::abs(qp.objective(y) + qp.constant - direct) <= 1e-8);
        CHECK(std::abs(verify::quadratic_value(qp.q, qp.c, y) - qp.objective(y)) <= 1e-12);
    }
}

TEST_CASE("box QP hand examples")
{
    SUBCASE("clipped 1-D minimum")
    {
        const QpResult r = solve_box_qp(make_qp(Matrix::Constant(1, 1, 0.32), Vector::Constant(1, -0.64)));
        CHECK(r.converged);
        CHECK(r.y(0) == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("interior 1-D minimum")
    {
        const QpResult r = solve_box_qp(make_qp(Matrix::Constant(1, 1, 2.0), Vector::Constant(1, -1.0)));
        CHECK(r.y(0) == doctest::Approx(0.5).epsilon(1e-8));
    }
    SUBCASE("separable clipping")
    {
        Vector c(2);
        c << 1, -3;
        const QpResult r = solve_box_qp(make_qp(Matrix::Identity(2, 2), c));
        CHECK(std::abs(r.y(0)) <= 1e-12);
        CHECK(std::abs(r.y(1) - 1.0) <= 1e-12);
        CHECK(r.projected_gradient_norm <= 1e-8);
    }
    SUBCASE("empty problem")
    {
        CHECK_THROWS_AS(solve_box_qp(make_qp(Matrix(0, 0), Vector(0))), ContractError);
    }
    SUBCASE("malformed input")
    {
        CHECK_THROWS_AS(solve_box_qp(make_qp(Matrix::Identity(2, 2), Vector::Ones(3))), ContractError);
        CHECK_THROWS_AS(solve_box_qp(make_qp(Matrix::Identity(1, 1), Vector::Ones(1)), Vector::Ones(2)),
                        ContractError);
    }
}

TEST_CASE("accelerated and plain solvers agree on larger problems")
{
    Rng rng(24);
    for (int rep = 0; rep < 10; ++rep) {
        const auto inst = verify::random_instance(rng, 30, 60, 4, true);
        const BoxQP qp = build_constraint_problem(inst.labeled, inst.x_unlabeled, true);
        QpOptions plain;
        plain.accelerate = false;
        const QpResult a = solve_box_qp(qp);
        const QpResult b = solve_box_qp(qp, std::nullopt, plain);
        CHECK(a.converged);
        CHECK(a.y.minCoeff() >= 0.0);
        CHECK(a.y.maxCoeff() <= 1.0);
        CHECK(std::abs(a.objective - b.objective) <= 1e-8);
    }
}

TEST_CASE("fit_icls hand examples")
{
    SUBCASE("supervised solution outside the constraint set")
    {
        const IclsFit fit = fit_icls(one_point(), Matrix::Constant(1, 1, 2.0), false);
        CHECK(fit.y_u_star(0) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(fit.model.beta(0) == doctest::Approx(0.6).epsilon(1e-10));
        CHECK(fit.converged);
    }
    SUBCASE("supervised solution already inside")
    {
        Matrix x(2, 1);
        x << 1, 1;
        Vector y(2);
        y << 1, 0;
        const IclsFit fit = fit_icls(LabeledSet::make(x, y), Matrix::Constant(1, 1, 1.0), false);
        CHECK(fit.model.beta(0) == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(fit.objective == doctest::Approx(0.25).epsilon(1e-10));
    }
    SUBCASE("all-zero unlabeled rows leave the supervised solution")
    {
        Rng rng(25);
        const auto inst = verify::random_instance(rng, 20, 1, 3, false);
        const LinearModel sup = fit_ls(inst.labeled, false);
        const IclsFit fit = fit_icls(inst.labeled, Matrix::Zero(4, 3), false);
        CHECK((fit.model.beta - sup.beta).lpNorm<Eigen::Infinity>() <=
              1e-12 * (1.0 + sup.beta.lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("ICLS labeled risk is no lower than supervised and refits reproduce it")
{
    Rng rng(26);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t d = 1 + rng.below(4);
        const auto inst = verify::random_instance(rng, d + 3 + rng.below(10), 1 + rng.below(20), d, rep % 2 == 0);
        const LinearModel sup = fit_ls(inst.labeled, inst.intercept);
        const IclsFit fit = fit_icls(inst.labeled, inst.x_unlabeled, inst.intercept);
        CHECK(risk_hat(fit.model, inst.labeled) >= risk_hat(sup, inst.labeled) - 1e-12);
        CHECK(std::abs(fit.objective - risk_hat(fit.model, inst.labeled)) <= 1e-8);
        const LinearModel refit =
            fit_targets(vstack(inst.labeled.x, inst.x_unlabeled), vstack(inst.labeled.y, fit.y_u_star), inst.intercept);
        CHECK((refit.beta - fit.model.beta).lpNorm<Eigen::Infinity>() <=
              1e-8 * (1.0 + fit.model.beta.lpNorm<Eigen::Infinity>()));
    }
}
