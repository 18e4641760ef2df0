#include "icls/baselines.hpp"

#include <set>
#include <vector>

namespace icls {

namespace {

std::vector<int> as_key(const Eigen::VectorXi& labels)
{
    return {labels.data(), labels.data() + labels.size()};
}

}  // namespace

SelfLearnFit fit_self_learning(const LabeledSet& labeled, const Matrix& x_unlabeled, bool intercept,
                               std::size_t max_iterations)
{
    require(x_unlabeled.rows() == 0 || x_unlabeled.cols() == labeled.dim(),
            "self-learning: unlabeled feature count mismatch");

    SelfLearnFit fit;
    fit.model = fit_ls(labeled, intercept);
    if (x_unlabeled.rows() == 0) {
        fit.converged = true;
        return fit;
    }

    const Matrix x_all = vstack(labeled.x, x_unlabeled);
    std::set<std::vector<int>> seen;
    Eigen::VectorXi imputed = fit.model.classify(x_unlabeled);
    seen.insert(as_key(imputed));

    for (std::size_t it = 1; it <= max_iterations; ++it) {
        fit.model = fit_targets(x_all, vstack(labeled.y, Vector(imputed.cast<double>())), intercept);
        fit.imputed = imputed;
        fit.iterations = it;

        Eigen::VectorXi next = fit.model.classify(x_unlabeled);
        if (next == imputed) {
            fit.converged = true;
            return fit;
        }
        if (!seen.insert(as_key(next)).second) {
            fit.cycled = true;
            return fit;
        }
        imputed = std::move(next);
    }
    return fit;
}

LinearModel fit_usm(const LabeledSet& labeled, const Matrix& x_unlabeled)
{
    require(x_unlabeled.rows() == 0 || x_unlabeled.cols() == labeled.dim(),
            "usm: unlabeled feature count mismatch");

    const Eigen::Index l = labeled.size();
    const Eigen::Index u = x_unlabeled.rows();
    const Matrix x_all = vstack(labeled.x, x_unlabeled);
    const CenteredColumns all = center_columns(x_all);
    const Matrix xc = all.centered.topRows(l);

    // Labels centered as (L y_i - sum y) / L. Swapping the encoding negates
    // these exactly, which keeps the decision rule encoding invariant.
    const double positives = labeled.y.sum();
    const auto ld = static_cast<double>(l);
    Vector yc(l);
    for (Eigen::Index i = 0; i < l; ++i) {
        yc(i) = (ld * labeled.y(i) - positives) / ld;
    }

    const double scale = ld / static_cast<double>(l + u);
    const Matrix second_moment = scale * (all.centered.transpose() * all.centered);

    LinearModel model;
    model.has_intercept = false;
    model.beta = pinv_solve(second_moment, xc.transpose() * yc);
    model.feature_means = all.means;
    model.label_offset = positives / ld;
    // 0.5 - mean(y), written so the swapped encoding yields its exact negation.
    model.centered_threshold = (ld - 2.0 * positives) / (2.0 * ld);
    return model;
}

LinearModel fit_oracle(const LabeledSet& labeled, const Matrix& x_unlabeled, const Vector& y_unlabeled,
                       bool intercept)
{
    require(x_unlabeled.rows() == y_unlabeled.size(), "oracle: unlabeled rows and labels differ in count");
    if (x_unlabeled.rows() == 0) {
        return fit_ls(labeled, intercept);
    }
    const LabeledSet all =
        LabeledSet::make(vstack(labeled.x, x_unlabeled), vstack(labeled.y, y_unlabeled));
    return fit_ls(all, intercept);
}

}  // namespace icls
