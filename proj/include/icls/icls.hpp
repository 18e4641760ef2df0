#pragma once

// Implicitly constrained least squares.
//
// The semi-supervised estimate is the least squares fit on labeled plus
// unlabeled rows whose unlabeled targets y_u in [0,1]^U are chosen to minimize
// the squared loss on the labeled rows alone. Substituting the closed-form fit
// turns that search into a box-constrained convex QP in y_u:
//
//     min 1/2 y_u^T Q y_u + c^T y_u   s.t. 0 <= y_u <= 1
//
//     G = pinv(X_e^T X_e),  B = X_u G X^T   (U x L)
//     Q = (2/L) B B^T
//     c = (2/L) B (X G X^T y - y)
//
// which equals (1/L) ||X G X_e^T [y; y_u] - y||^2 up to a constant.

#include <cstddef>
#include <optional>

#include "icls/linalg.hpp"
#include "icls/supervised.hpp"

namespace icls {

struct BoxQP {
    Matrix q;  // U x U, symmetric PSD
    Vector c;
    // Objective of the labeled-loss problem at y_u = 0, so that
    // 1/2 y^T Q y + c^T y + constant is the labeled empirical risk.
    double constant = 0.0;
    // Optional factor F with Q = F F^T. Used for cheaper products when present.
    std::optional<Matrix> factor;

    static constexpr double lower = 0.0;
    static constexpr double upper = 1.0;

    Eigen::Index size() const { return c.size(); }

    Vector gradient(const Vector& y) const;
    // 1/2 y^T Q y + c^T y (without the constant).
    double objective(const Vector& y) const;
};

BoxQP build_constraint_problem(const LabeledSet& labeled, const Matrix& x_unlabeled, bool intercept);

struct QpOptions {
    double tolerance = 1e-8;            // on ||P(y - g) - y||_inf
    std::size_t max_iterations = 0;     // 0 selects max(2000, 20 U)
    bool accelerate = true;             // subspace Newton steps between gradient steps
};

struct QpResult {
    Vector y;
    double objective = 0.0;  // without BoxQP::constant
    std::size_t iterations = 0;
    bool converged = false;
    double projected_gradient_norm = 0.0;
};

// Projected gradient with Barzilai-Borwein step lengths and a nonmonotone
// backtracking search along the projection arc. With `accelerate`, a
// minimum-norm Newton step on the current free variables follows each
// gradient step whose active set did not change.
QpResult solve_box_qp(const BoxQP& qp, const std::optional<Vector>& y0 = std::nullopt,
                      const QpOptions& options = {});

// max(2000, 20 U)
std::size_t default_iteration_cap(Eigen::Index u);

double projected_gradient_norm(const BoxQP& qp, const Vector& y);

struct IclsFit {
    LinearModel model;
    Vector y_u_star;
    double objective = 0.0;  // labeled empirical risk of model
    std::size_t solver_iterations = 0;
    bool converged = false;
};

IclsFit fit_icls(const LabeledSet& labeled, const Matrix& x_unlabeled, bool intercept,
                 const QpOptions& options = {});

}  // namespace icls
