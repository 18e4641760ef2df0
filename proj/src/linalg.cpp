#include "icls/linalg.hpp"

#include <cmath>

namespace icls {

bool all_finite(const Matrix& m) { return m.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

void require(bool condition, const std::string& what)
{
    if (!condition) {
        throw ContractError(what);
    }
}

PseudoInverse::PseudoInverse(const Matrix& a) : rows_(a.rows()), cols_(a.cols())
{
    require(a.rows() > 0 && a.cols() > 0, "pseudo-inverse of an empty matrix");
    require(all_finite(a), "pseudo-inverse input contains non-finite entries");

    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const double cutoff = kSvdCutoff * (s.size() > 0 ? s(0) : 0.0);

    // Singular values come sorted in decreasing order.
    rank_ = 0;
    while (rank_ < s.size() && s(rank_) > 0.0 && s(rank_) >= cutoff) {
        ++rank_;
    }
    u_ = svd.matrixU().leftCols(rank_);
    sigma_ = s.head(rank_);
    v_ = svd.matrixV().leftCols(rank_);
}

Vector PseudoInverse::solve(const Vector& b) const
{
    require(b.size() == rows_, "pseudo-inverse solve: right-hand side length mismatch");
    require(all_finite(b), "pseudo-inverse solve: non-finite right-hand side");
    if (rank_ == 0) {
        return Vector::Zero(cols_);
    }
    Vector coeffs = u_.transpose() * b;
    coeffs.array() /= sigma_.array();
    return v_ * coeffs;
}

Matrix PseudoInverse::solve(const Matrix& b) const
{
    require(b.rows() == rows_, "pseudo-inverse solve: right-hand side rows mismatch");
    require(all_finite(b), "pseudo-inverse solve: non-finite right-hand side");
    if (rank_ == 0) {
        return Matrix::Zero(cols_, b.cols());
    }
    Matrix coeffs = u_.transpose() * b;
    coeffs.array().colwise() /= sigma_.array();
    return v_ * coeffs;
}

Matrix PseudoInverse::matrix() const
{
    if (rank_ == 0) {
        return Matrix::Zero(cols_, rows_);
    }
    return v_ * sigma_.cwiseInverse().asDiagonal() * u_.transpose();
}

Matrix PseudoInverse::gram_inverse() const
{
    if (rank_ == 0) {
        return Matrix::Zero(cols_, cols_);
    }
    Matrix scaled = v_ * sigma_.cwiseInverse().asDiagonal();
    return scaled * scaled.transpose();
}

Vector PseudoInverse::gram_solve(const Vector& x) const
{
    require(x.size() == cols_, "gram_solve: length mismatch");
    if (rank_ == 0) {
        return Vector::Zero(cols_);
    }
    Vector coeffs = v_.transpose() * x;
    coeffs.array() /= sigma_.array().square();
    return v_ * coeffs;
}

Vector pinv_solve(const Matrix& a, const Vector& b)
{
    require(a.rows() == b.size(), "pinv_solve: A has " + std::to_string(a.rows()) +
                                      " rows but b has length " + std::to_string(b.size()));
    return PseudoInverse(a).solve(b);
}

CenteredColumns center_columns(const Matrix& m, const std::optional<Vector>& means)
{
    require(m.rows() > 0, "center_columns: empty matrix");
    CenteredColumns out;
    if (means) {
        require(means->size() == m.cols(), "center_columns: means length mismatch");
        out.means = *means;
    } else {
        out.means = m.colwise().mean().transpose();
    }
    out.centered = m.rowwise() - out.means.transpose();
    return out;
}

double min_eigenvalue_symmetric(const Matrix& s)
{
    require(s.rows() == s.cols() && s.rows() > 0, "min_eigenvalue_symmetric: not square");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

double asymmetry(const Matrix& s)
{
    require(s.rows() == s.cols(), "asymmetry: not square");
    return (s - s.transpose()).cwiseAbs().maxCoeff();
}

Matrix vstack(const Matrix& top, const Matrix& bottom)
{
    if (top.rows() == 0) return bottom;
    if (bottom.rows() == 0) return top;
    require(top.cols() == bottom.cols(), "vstack: column count mismatch");
    Matrix out(top.rows() + bottom.rows(), top.cols());
    out << top, bottom;
    return out;
}

Vector vstack(const Vector& top, const Vector& bottom)
{
    if (top.size() == 0) return bottom;
    if (bottom.size() == 0) return top;
    Vector out(top.size() + bottom.size());
    out << top, bottom;
    return out;
}

}  // namespace icls
