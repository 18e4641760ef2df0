#pragma once

// Reference computations used to check the library. Each one takes a route
// that is independent of the code it checks: closed-form cofactor inverses
// instead of SVD, LU-based normal equations instead of the pseudo-inverse,
// grid search instead of the QP solver, brute-force enumeration instead of
// the Wilcoxon recursion, adaptive Simpson instead of Gauss-Kronrod.

#include <cstddef>
#include <functional>
#include <span>

#include "icls/linalg.hpp"
#include "icls/random.hpp"
#include "icls/supervised.hpp"

namespace icls::verify {

// Solves the 2-column least squares problem through the cofactor inverse of
// the 2x2 normal matrix.
Vector cofactor_normal_solve(const Matrix& a, const Vector& b);

// beta = (X_e^T X_e)^{-1} X_e^T t with an LU inverse; X_e must have full
// column rank.
Vector lu_normal_solve(const Matrix& design, const Vector& targets);

// Labeled empirical risk as a direct function of the soft labels:
// (1/L) ||X (X_e^T X_e)^{-1} X_e^T [y; y_u] - y||^2, LU inverse.
double soft_label_risk(const LabeledSet& labeled, const Matrix& x_unlabeled, const Vector& y_unlabeled,
                       bool intercept);

// 1/2 y^T Q y + c^T y with explicit loops.
double quadratic_value(const Matrix& q, const Vector& c, const Vector& y);

// Minimum of the quadratic over the grid {0, step, ..., 1}^U.
double grid_minimum(const Matrix& q, const Vector& c, double step);

// Central differences of f at y with step h.
Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& y, double h);

// Two-sided signed-rank p-value by enumerating all 2^n sign assignments of the
// non-zero differences; ranks averaged over ties.
double wilcoxon_enumeration_p(std::span<const double> differences);

// Adaptive Simpson quadrature to absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

struct RandomInstance {
    LabeledSet labeled;
    Matrix x_unlabeled;
    Vector y_unlabeled;
    bool intercept = true;
};

// Gaussian features (two shifted classes, both present among the labeled
// rows) with the given sizes.
RandomInstance random_instance(Rng& rng, std::size_t labeled, std::size_t unlabeled, std::size_t dim,
                               bool intercept);

}  // namespace icls::verify
