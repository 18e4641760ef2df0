#include "icls/verify/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace icls::verify {

Vector cofactor_normal_solve(const Matrix& a, const Vector& b)
{
    require(a.cols() == 2 && a.rows() == b.size(), "cofactor_normal_solve: need an n x 2 system");
    double s00 = 0.0, s01 = 0.0, s11 = 0.0, r0 = 0.0, r1 = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        s00 += a(i, 0) * a(i, 0);
        s01 += a(i, 0) * a(i, 1);
        s11 += a(i, 1) * a(i, 1);
        r0 += a(i, 0) * b(i);
        r1 += a(i, 1) * b(i);
    }
    const double det = s00 * s11 - s01 * s01;
    require(det != 0.0, "cofactor_normal_solve: singular normal matrix");
    Vector x(2);
    x(0) = (s11 * r0 - s01 * r1) / det;
    x(1) = (-s01 * r0 + s00 * r1) / det;
    return x;
}

Vector lu_normal_solve(const Matrix& design, const Vector& targets)
{
    const Matrix gram = design.transpose() * design;
    Eigen::FullPivLU<Matrix> lu(gram);
    require(lu.isInvertible(), "lu_normal_solve: design is rank deficient");
    return lu.inverse() * (design.transpose() * targets);
}

double soft_label_risk(const LabeledSet& labeled, const Matrix& x_unlabeled, const Vector& y_unlabeled,
                       bool intercept)
{
    const Matrix x = design_matrix(labeled.x, intercept);
    const Matrix xe = vstack(x, design_matrix(x_unlabeled, intercept));
    const Vector beta = lu_normal_solve(xe, vstack(labeled.y, y_unlabeled));
    return (x * beta - labeled.y).squaredNorm() / static_cast<double>(labeled.size());
}

double quadratic_value(const Matrix& q, const Vector& c, const Vector& y)
{
    double v = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        for (Eigen::Index j = 0; j < y.size(); ++j) {
            v += 0.5 * y(i) * q(i, j) * y(j);
        }
        v += c(i) * y(i);
    }
    return v;
}

double grid_minimum(const Matrix& q, const Vector& c, double step)
{
    const Eigen::Index n = c.size();
    const auto points = static_cast<std::size_t>(std::llround(1.0 / step)) + 1;
    std::vector<std::size_t> digits(static_cast<std::size_t>(n), 0);
    Vector y(n);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        for (Eigen::Index i = 0; i < n; ++i) {
            y(i) = std::min(1.0, static_cast<double>(digits[static_cast<std::size_t>(i)]) * step);
        }
        best = std::min(best, quadratic_value(q, c, y));
        std::size_t k = 0;
        while (k < digits.size() && ++digits[k] == points) {
            digits[k] = 0;
            ++k;
        }
        if (k == digits.size()) {
            break;
        }
    }
    return best;
}

Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& y, double h)
{
    Vector g(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        Vector up = y;
        Vector down = y;
        up(i) += h;
        down(i) -= h;
        g(i) = (f(up) - f(down)) / (2.0 * h);
    }
    return g;
}

double wilcoxon_enumeration_p(std::span<const double> differences)
{
    std::vector<double> d;
    for (double v : differences) {
        if (v != 0.0) d.push_back(v);
    }
    const std::size_t n = d.size();
    if (n == 0) {
        return 1.0;
    }
    // Average ranks by counting: rank = (#smaller) + (#equal + 1) / 2.
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n; ++i) {
        double smaller = 0.0, equal = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(d[j]) < std::abs(d[i])) smaller += 1.0;
            if (std::abs(d[j]) == std::abs(d[i])) equal += 1.0;
        }
        rank[i] = smaller + (equal + 1.0) / 2.0;
    }
    double observed = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] > 0.0) observed += rank[i];
    }
    std::size_t le = 0, ge = 0;
    const std::size_t total = std::size_t{1} << n;
    for (std::size_t mask = 0; mask < total; ++mask) {
        double w = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (std::size_t{1} << i)) w += rank[i];
        }
        if (w <= observed) ++le;
        if (w >= observed) ++ge;
    }
    return std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(total));
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                    double fb, double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol)
{
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, 50);
}

RandomInstance random_instance(Rng& rng, std::size_t labeled, std::size_t unlabeled, std::size_t dim,
                               bool intercept)
{
    require(labeled >= 2, "random_instance: need at least two labeled rows");
    auto draw = [&](std::size_t rows, Vector& y, bool force_both) {
        Matrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
        y.resize(static_cast<Eigen::Index>(rows));
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const bool positive = force_both && i < 2 ? i == 1 : rng.bernoulli(0.5);
            y(i) = positive ? 1.0 : 0.0;
            for (Eigen::Index j = 0; j < x.cols(); ++j) {
                x(i, j) = rng.normal() + (positive ? 0.75 : -0.75);
            }
        }
        return x;
    };
    RandomInstance inst;
    Vector y;
    Matrix x = draw(labeled, y, true);
    inst.labeled = LabeledSet::make(std::move(x), std::move(y));
    inst.x_unlabeled = draw(unlabeled, inst.y_unlabeled, false);
    inst.intercept = intercept;
    return inst;
}

}  // namespace icls::verify
