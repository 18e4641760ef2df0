#pragma once

#include <optional>

#include "icls/linalg.hpp"

namespace icls {

// Scores at or above this value are class 1.
inline constexpr double kDecisionThreshold = 0.5;

// Linear scoring rule. Plain models score x^T beta (with a leading 1 when
// has_intercept). Centered models score (x - feature_means)^T beta + label_offset
// and compare the centered part against centered_threshold, which equals
// 0.5 - label_offset but is stored exactly so that label-swapped fits give
// bitwise-complementary decisions.
struct LinearModel {
    Vector beta;
    bool has_intercept = false;
    double label_offset = 0.0;
    std::optional<Vector> feature_means;
    double centered_threshold = kDecisionThreshold;

    bool centered() const { return feature_means.has_value(); }
    Eigen::Index feature_count() const;

    Vector scores(const Matrix& x) const;
    Eigen::VectorXi classify(const Matrix& x) const;
};

// Labeled training data: raw features (no intercept column) and {0,1} labels.
struct LabeledSet {
    Matrix x;
    Vector y;

    // Validates shapes, finiteness, and that every label is 0 or 1.
    static LabeledSet make(Matrix x, Vector y);

    Eigen::Index size() const { return x.rows(); }
    Eigen::Index dim() const { return x.cols(); }
};

// Prepends a constant-1 column when intercept is set.
Matrix design_matrix(const Matrix& x, bool intercept);

// Least squares fit against arbitrary real targets; soft or imputed labels
// go through here.
LinearModel fit_targets(const Matrix& x, const Vector& targets, bool intercept);

LinearModel fit_ls(const LabeledSet& data, bool intercept);

// (1/n) * ||scores - targets||^2
double risk_hat(const LinearModel& model, const Matrix& x, const Vector& targets);
double risk_hat(const LinearModel& model, const LabeledSet& data);

Eigen::VectorXi classify(const LinearModel& model, const Matrix& x);

}  // namespace icls
