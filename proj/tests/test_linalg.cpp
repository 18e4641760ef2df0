#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "icls/linalg.hpp"
#include "icls/random.hpp"
#include "icls/verify/oracles.hpp"

using namespace icls;

namespace {

Matrix random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c)
{
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
    return m;
}

Vector random_vector(Rng& rng, Eigen::Index n)
{
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
    return v;
}

}  // namespace

TEST_CASE("pinv_solve on the identity returns b")
{
    const Vector x = pinv_solve(Matrix::Identity(2, 2), Vector::Map(std::vector<double>{3, 4}.data(), 2));
    CHECK(x(0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(x(1) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("rank-1 system gets the minimum-norm solution")
{
    Matrix a(2, 2);
    a << 1, 1, 1, 1;
    Vector b(2);
    b << 2, 2;
    const Vector x = pinv_solve(a, b);
    CHECK(std::abs(x(0) - 1.0) < 1e-12);
    CHECK(std::abs(x(1) - 1.0) < 1e-12);
    CHECK(PseudoInverse(a).rank() == 1);
}

TEST_CASE("5x2 least squares agrees with the cofactor oracle")
{
    Rng rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        const Matrix a = random_matrix(rng, 5, 2);
        const Vector b = random_vector(rng, 5);
        const Vector x = pinv_solve(a, b);
        const Vector ref = verify::cofactor_normal_solve(a, b);
        CHECK((x - ref).lpNorm<Eigen::Infinity>() <= 1e-10 * (1.0 + ref.lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("full column rank solutions satisfy the normal equations")
{
    Rng rng(12);
    for (int rep = 0; rep < 100; ++rep) {
        const auto rows = static_cast<Eigen::Index>(3 + rng.below(20));
        const auto cols = static_cast<Eigen::Index>(1 + rng.below(static_cast<std::uint64_t>(rows)));
        const Matrix a = random_matrix(rng, rows, cols);
        const Vector b = random_vector(rng, rows);
        const Vector x = pinv_solve(a, b);
        const double resid = (a.transpose() * (a * x - b)).lpNorm<Eigen::Infinity>();
        CHECK(resid <= 1e-8 * (1.0 + (a.transpose() * b).lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("rank-deficient solutions have no null-space component")
{
    Rng rng(13);
    for (int rep = 0; rep < 100; ++rep) {
        const auto rows = static_cast<Eigen::Index>(4 + rng.below(10));
        const auto rank = static_cast<Eigen::Index>(1 + rng.below(3));
        const auto cols = rank + static_cast<Eigen::Index>(1 + rng.below(3));
        const Matrix a = random_matrix(rng, rows, rank) * random_matrix(rng, rank, cols);
        const Vector b = random_vector(rng, rows);
        const Vector x = pinv_solve(a, b);
        // Null space of A from a full SVD computed independently.
        Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
        const Matrix null = svd.matrixV().rightCols(cols - rank);
        CHECK((null.transpose() * x).norm() <= 1e-10);
        CHECK(PseudoInverse(a).rank() == rank);
    }
}

TEST_CASE("pseudo-inverse helpers are consistent")
{
    Rng rng(14);
    const Matrix a = random_matrix(rng, 7, 3);
    const PseudoInverse p(a);
    CHECK(p.rows() == 7);
    CHECK(p.cols() == 3);
    const Matrix gi = p.gram_inverse();
    const Matrix ref = (a.transpose() * a).inverse();
    CHECK((gi - ref).lpNorm<Eigen::Infinity>() <= 1e-10);
    const Vector v = random_vector(rng, 3);
    CHECK((p.gram_solve(v) - ref * v).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK((p.matrix() * a - Matrix::Identity(3, 3)).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("pinv_solve rejects mismatched or non-finite input")
{
    CHECK_THROWS_AS(pinv_solve(Matrix::Identity(2, 2), Vector::Ones(3)), ContractError);
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(pinv_solve(bad, Vector::Ones(2)), ContractError);
}

TEST_CASE("center_columns")
{
    SUBCASE("already centered columns are unchanged")
    {
        Matrix m(3, 2);
        m << -1, 2, 0, 0, 1, -2;
        const auto c = center_columns(m);
        CHECK(c.centered == m);
        CHECK(c.means.isZero());
    }
    SUBCASE("single column")
    {
        Matrix m(3, 1);
        m << 1, 2, 3;
        const auto c = center_columns(m);
        CHECK(c.means(0) == 2.0);
        CHECK(c.centered(0, 0) == -1.0);
        CHECK(c.centered(1, 0) == 0.0);
        CHECK(c.centered(2, 0) == 1.0);
    }
    SUBCASE("internal means leave zero-mean columns")
    {
        Rng rng(15);
        for (int rep = 0; rep < 50; ++rep) {
            Matrix m = random_matrix(rng, 1 + static_cast<Eigen::Index>(rng.below(40)), 4);
            m.array() += 100.0 * rng.normal();
            const auto c = center_columns(m);
            CHECK(c.centered.colwise().mean().cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
    SUBCASE("supplied means are used verbatim")
    {
        Matrix m(2, 1);
        m << 1, 3;
        const auto c = center_columns(m, Vector::Constant(1, 1.0));
        CHECK(c.centered(1, 0) == 2.0);
    }
}

TEST_CASE("vstack handles empty blocks")
{
    Matrix a(2, 3);
    a.setOnes();
    CHECK(vstack(a, Matrix(0, 3)).rows() == 2);
    CHECK(vstack(Matrix(0, 3), a).rows() == 2);
    CHECK(vstack(Vector(0), Vector::Ones(2)).size() == 2);
    CHECK_THROWS_AS(vstack(a, Matrix::Ones(1, 2)), ContractError);
}
