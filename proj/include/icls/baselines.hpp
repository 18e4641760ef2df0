#pragma once

// Comparison learners: self-learning, the updated-second-moment plug-in
// estimator (USM), and the oracle that sees the true unlabeled labels.

#include <cstddef>

#include "icls/linalg.hpp"
#include "icls/supervised.hpp"

namespace icls {

inline constexpr std::size_t kSelfLearningCap = 100;

struct SelfLearnFit {
    LinearModel model;
    Eigen::VectorXi imputed;       // labels the final model was fitted on
    std::size_t iterations = 0;    // refits on imputed labels
    bool converged = false;        // imputed == classify(model, X_u)
    bool cycled = false;           // stopped on a revisited non-fixed labeling
};

// Starts from the supervised fit, then alternates hard imputation of all
// unlabeled rows with refitting on labeled + imputed rows until the imputed
// labeling is a fixed point, repeats an earlier labeling, or the cap is hit.
SelfLearnFit fit_self_learning(const LabeledSet& labeled, const Matrix& x_unlabeled, bool intercept,
                               std::size_t max_iterations = kSelfLearningCap);

// Centered plug-in estimator
//     beta = pinv((L / (L+U)) Xc_e^T Xc_e) Xc^T yc
// with features centered by the combined labeled+unlabeled mean and labels
// by the labeled mean.
LinearModel fit_usm(const LabeledSet& labeled, const Matrix& x_unlabeled);

LinearModel fit_oracle(const LabeledSet& labeled, const Matrix& x_unlabeled, const Vector& y_unlabeled,
                       bool intercept);

}  // namespace icls
