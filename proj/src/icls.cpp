#include "icls/icls.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

namespace icls {

namespace {

constexpr std::size_t kNonmonotoneMemory = 10;
constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-12;
constexpr double kMaxStep = 1e12;
constexpr int kMaxBacktracks = 60;
// Without a factor the subspace step factorizes Q_FF directly; skip it for
// large free sets.
constexpr Eigen::Index kDenseSubspaceLimit = 256;

Vector clamp_box(const Vector& y)
{
    return y.cwiseMax(BoxQP::lower).cwiseMin(BoxQP::upper);
}

Vector multiply(const BoxQP& qp, const Vector& y)
{
    if (qp.factor) {
        return *qp.factor * (qp.factor->transpose() * y);
    }
    return qp.q * y;
}

// Indices strictly inside the box.
std::vector<Eigen::Index> free_set(const Vector& y)
{
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y(i) > BoxQP::lower && y(i) < BoxQP::upper) {
            idx.push_back(i);
        }
    }
    return idx;
}

// Minimum-norm Newton direction restricted to the free variables:
// delta_F = -pinv(Q_FF) g_F, zero elsewhere.
std::optional<Vector> subspace_direction(const BoxQP& qp, const std::vector<Eigen::Index>& free,
                                         const Vector& g)
{
    const auto nf = static_cast<Eigen::Index>(free.size());
    if (nf == 0) {
        return std::nullopt;
    }
    Vector g_free(nf);
    for (Eigen::Index k = 0; k < nf; ++k) {
        g_free(k) = g(free[k]);
    }
    Vector step;
    if (qp.factor) {
        Matrix f_free(nf, qp.factor->cols());
        for (Eigen::Index k = 0; k < nf; ++k) {
            f_free.row(k) = qp.factor->row(free[k]);
        }
        step = PseudoInverse(f_free.transpose()).gram_solve(g_free);
    } else {
        if (nf > kDenseSubspaceLimit) {
            return std::nullopt;
        }
        Matrix q_free(nf, nf);
        for (Eigen::Index a = 0; a < nf; ++a) {
            for (Eigen::Index b = 0; b < nf; ++b) {
                q_free(a, b) = qp.q(free[a], free[b]);
            }
        }
        step = PseudoInverse(q_free).solve(g_free);
    }
    Vector direction = Vector::Zero(g.size());
    for (Eigen::Index k = 0; k < nf; ++k) {
        direction(free[k]) = -step(k);
    }
    return direction;
}

// Largest t in [0, 1] keeping y + t d inside the box.
double max_feasible_step(const Vector& y, const Vector& d)
{
    double t = 1.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (d(i) > 0.0) {
            t = std::min(t, (BoxQP::upper - y(i)) / d(i));
        } else if (d(i) < 0.0) {
            t = std::min(t, (BoxQP::lower - y(i)) / d(i));
        }
    }
    return std::max(t, 0.0);
}

bool same_active_set(const Vector& a, const Vector& b)
{
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const bool a_free = a(i) > BoxQP::lower && a(i) < BoxQP::upper;
        const bool b_free = b(i) > BoxQP::lower && b(i) < BoxQP::upper;
        if (a_free != b_free || (!a_free && a(i) != b(i))) {
            return false;
        }
    }
    return true;
}

}  // namespace

Vector BoxQP::gradient(const Vector& y) const
{
    require(y.size() == size(), "BoxQP::gradient: length mismatch");
    return multiply(*this, y) + c;
}

double BoxQP::objective(const Vector& y) const
{
    require(y.size() == size(), "BoxQP::objective: length mismatch");
    return 0.5 * y.dot(multiply(*this, y)) + c.dot(y);
}

BoxQP build_constraint_problem(const LabeledSet& labeled, const Matrix& x_unlabeled, bool intercept)
{
    require(x_unlabeled.rows() >= 1, "constraint problem needs at least one unlabeled row");
    require(x_unlabeled.cols() == labeled.dim(), "unlabeled rows have " +
                                                     std::to_string(x_unlabeled.cols()) +
                                                     " features, labeled rows have " +
                                                     std::to_string(labeled.dim()));
    require(all_finite(x_unlabeled), "unlabeled features contain non-finite values");

    const Matrix x = design_matrix(labeled.x, intercept);
    const Matrix xu = design_matrix(x_unlabeled, intercept);
    const Matrix g = PseudoInverse(vstack(x, xu)).gram_inverse();
    const auto l = static_cast<double>(labeled.size());

    const Matrix gxt = g * x.transpose();                   // (d+1) x L
    const Matrix b = xu * gxt;                               // U x L
    const Vector residual = x * (gxt * labeled.y) - labeled.y;  // X G X^T y - y

    BoxQP qp;
    const double scale = std::sqrt(2.0 / l);
    Matrix factor = scale * b;
    // Fill one triangle and mirror it so Q is exactly symmetric.
    qp.q = Matrix::Zero(b.rows(), b.rows());
    qp.q.selfadjointView<Eigen::Lower>().rankUpdate(factor);
    qp.q.triangularView<Eigen::StrictlyUpper>() = qp.q.transpose();
    qp.c = (2.0 / l) * (b * residual);
    qp.constant = residual.squaredNorm() / l;
    qp.factor = std::move(factor);
    return qp;
}

std::size_t default_iteration_cap(Eigen::Index u)
{
    return std::max<std::size_t>(2000, 20 * static_cast<std::size_t>(u));
}

double projected_gradient_norm(const BoxQP& qp, const Vector& y)
{
    const Vector g = qp.gradient(y);
    return (clamp_box(y - g) - y).lpNorm<Eigen::Infinity>();
}

QpResult solve_box_qp(const BoxQP& qp, const std::optional<Vector>& y0, const QpOptions& options)
{
    const Eigen::Index n = qp.size();
    require(n >= 1, "solve_box_qp: empty problem");
    require(qp.q.rows() == n && qp.q.cols() == n, "solve_box_qp: Q shape does not match c");
    require(!qp.factor || qp.factor->rows() == n, "solve_box_qp: factor rows do not match c");
    require(all_finite(qp.q) && all_finite(qp.c), "solve_box_qp: non-finite problem data");
    const std::size_t cap =
        options.max_iterations > 0 ? options.max_iterations : default_iteration_cap(n);

    Vector y = y0 ? clamp_box(*y0) : Vector::Constant(n, 0.5);
    require(y.size() == n, "solve_box_qp: start point length mismatch");

    Vector g = qp.gradient(y);
    double f = 0.5 * y.dot(g + qp.c);
    std::deque<double> recent{f};

    QpResult result;
    double pg_norm = (clamp_box(y - g) - y).lpNorm<Eigen::Infinity>();
    double alpha = 1.0 / std::max(pg_norm, kMinStep);
    alpha = std::clamp(alpha, kMinStep, kMaxStep);

    std::size_t it = 0;
    for (; it < cap && pg_norm > options.tolerance; ++it) {
        const double f_ref = *std::max_element(recent.begin(), recent.end());

        // Backtracking along the projection arc y(lambda) = P(y - lambda g).
        double lambda = alpha;
        Vector y_new;
        Vector g_new;
        double f_new = f;
        bool accepted = false;
        for (int k = 0; k < kMaxBacktracks; ++k) {
            y_new = clamp_box(y - lambda * g);
            const Vector d = y_new - y;
            g_new = qp.gradient(y_new);
            f_new = 0.5 * y_new.dot(g_new + qp.c);
            if (f_new <= f_ref + kArmijo * g.dot(d)) {
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            // No representable decrease along the arc.
            break;
        }

        const Vector s = y_new - y;
        const double sy = s.dot(g_new - g);
        alpha = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, kMinStep, kMaxStep) : kMaxStep;

        const bool settled = same_active_set(y, y_new);
        y = std::move(y_new);
        g = std::move(g_new);
        f = f_new;

        if (options.accelerate && settled) {
            if (auto d = subspace_direction(qp, free_set(y), g)) {
                const double curvature = d->dot(multiply(qp, *d));
                const double slope = g.dot(*d);
                if (slope < 0.0 && curvature > 0.0) {
                    const double t = std::min(-slope / curvature, max_feasible_step(y, *d));
                    if (t > 0.0) {
                        Vector y_try = clamp_box(y + t * *d);
                        Vector g_try = qp.gradient(y_try);
                        const double f_try = 0.5 * y_try.dot(g_try + qp.c);
                        if (f_try <= f) {
                            y = std::move(y_try);
                            g = std::move(g_try);
                            f = f_try;
                        }
                    }
                }
            }
        }

        recent.push_back(f);
        if (recent.size() > kNonmonotoneMemory) {
            recent.pop_front();
        }
        pg_norm = (clamp_box(y - g) - y).lpNorm<Eigen::Infinity>();
    }

    result.y = std::move(y);
    result.objective = qp.objective(result.y);
    result.iterations = it;
    result.projected_gradient_norm = pg_norm;
    result.converged = pg_norm <= options.tolerance;
    return result;
}

IclsFit fit_icls(const LabeledSet& labeled, const Matrix& x_unlabeled, bool intercept,
                 const QpOptions& options)
{
    const BoxQP qp = build_constraint_problem(labeled, x_unlabeled, intercept);
    QpResult solved = solve_box_qp(qp, Vector::Constant(qp.size(), 0.5), options);

    IclsFit fit;
    fit.model = fit_targets(vstack(labeled.x, x_unlabeled), vstack(labeled.y, solved.y), intercept);
    fit.y_u_star = std::move(solved.y);
    fit.objective = solved.objective + qp.constant;
    fit.solver_iterations = solved.iterations;
    fit.converged = solved.converged;
    return fit;
}

}  // namespace icls
