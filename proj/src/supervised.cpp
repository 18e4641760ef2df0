#include "icls/supervised.hpp"

#include <string>

namespace icls {

Eigen::Index LinearModel::feature_count() const
{
    return has_intercept ? beta.size() - 1 : beta.size();
}

Vector LinearModel::scores(const Matrix& x) const
{
    require(x.cols() == feature_count(), "model expects " + std::to_string(feature_count()) +
                                             " features, got " + std::to_string(x.cols()));
    if (centered()) {
        Vector s = center_columns(x, feature_means).centered * beta;
        s.array() += label_offset;
        return s;
    }
    if (has_intercept) {
        Vector s = x * beta.tail(beta.size() - 1);
        s.array() += beta(0);
        return s;
    }
    return x * beta;
}

Eigen::VectorXi LinearModel::classify(const Matrix& x) const
{
    if (centered()) {
        require(x.cols() == feature_count(), "model expects " + std::to_string(feature_count()) +
                                                 " features, got " + std::to_string(x.cols()));
        const Vector t = center_columns(x, feature_means).centered * beta;
        return (t.array() >= centered_threshold).cast<int>();
    }
    return (scores(x).array() >= kDecisionThreshold).cast<int>();
}

LabeledSet LabeledSet::make(Matrix x, Vector y)
{
    require(x.rows() >= 1, "labeled set must contain at least one row");
    require(x.rows() == y.size(), "labeled set: " + std::to_string(x.rows()) + " rows but " +
                                      std::to_string(y.size()) + " labels");
    require(all_finite(x), "labeled set: non-finite feature value");
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        require(y(i) == 0.0 || y(i) == 1.0,
                "labeled set: label at row " + std::to_string(i) + " is not 0 or 1");
    }
    return LabeledSet{std::move(x), std::move(y)};
}

Matrix design_matrix(const Matrix& x, bool intercept)
{
    if (!intercept) {
        return x;
    }
    Matrix d(x.rows(), x.cols() + 1);
    d.col(0).setOnes();
    d.rightCols(x.cols()) = x;
    return d;
}

LinearModel fit_targets(const Matrix& x, const Vector& targets, bool intercept)
{
    require(x.rows() >= 1, "fit: no training rows");
    require(x.rows() == targets.size(), "fit: row/target count mismatch");
    LinearModel model;
    model.has_intercept = intercept;
    model.beta = pinv_solve(design_matrix(x, intercept), targets);
    return model;
}

LinearModel fit_ls(const LabeledSet& data, bool intercept)
{
    return fit_targets(data.x, data.y, intercept);
}

double risk_hat(const LinearModel& model, const Matrix& x, const Vector& targets)
{
    require(x.rows() == targets.size(), "risk_hat: row/target count mismatch");
    require(x.rows() >= 1, "risk_hat: empty data");
    return (model.scores(x) - targets).squaredNorm() / static_cast<double>(x.rows());
}

double risk_hat(const LinearModel& model, const LabeledSet& data)
{
    return risk_hat(model, data.x, data.y);
}

Eigen::VectorXi classify(const LinearModel& model, const Matrix& x)
{
    return model.classify(x);
}

}  // namespace icls
