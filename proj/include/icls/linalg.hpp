#pragma once

// Dense linear-algebra primitives shared by the least squares classifiers.
//
// Every solve goes through a thin SVD with a relative singular-value cutoff,
// so rank-deficient systems (fewer rows than columns, collinear features)
// fall back to the minimum-norm least-squares solution automatically.

#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace icls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Raised when a caller breaks a documented precondition (shapes, ranges).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Singular values below kSvdCutoff * sigma_max are treated as zero.
inline constexpr double kSvdCutoff = 1e-12;

bool all_finite(const Matrix& m);
bool all_finite(const Vector& v);

// Throws ContractError naming `what` if the condition is false.
void require(bool condition, const std::string& what);

// Thin SVD of A with the relative cutoff applied; the retained rank is
// stored so the factors can be reused for several right-hand sides.
class PseudoInverse {
public:
    explicit PseudoInverse(const Matrix& a);

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    Eigen::Index rank() const { return rank_; }

    // Minimum-norm least-squares solution of A x = b.
    Vector solve(const Vector& b) const;
    Matrix solve(const Matrix& b) const;

    // pinv(A), cols x rows.
    Matrix matrix() const;

    // pinv(A^T A) = V diag(1/sigma^2) V^T, computed from the factors of A
    // so it never forms the squared-condition normal matrix.
    Matrix gram_inverse() const;

    // pinv(A^T A) * x without forming the cols x cols matrix.
    Vector gram_solve(const Vector& x) const;

private:
    Eigen::Index rows_ = 0;
    Eigen::Index cols_ = 0;
    Eigen::Index rank_ = 0;
    Matrix u_;       // rows x rank
    Vector sigma_;   // rank
    Matrix v_;       // cols x rank
};

// Minimum-norm least-squares solution of A x ~= b.
Vector pinv_solve(const Matrix& a, const Vector& b);

struct CenteredColumns {
    Matrix centered;
    Vector means;
};

// Subtracts column means. When `means` is given those are subtracted instead
// of the matrix's own means.
CenteredColumns center_columns(const Matrix& m, const std::optional<Vector>& means = std::nullopt);

// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue_symmetric(const Matrix& s);

// Max |S - S^T| entry.
double asymmetry(const Matrix& s);

// Stacks [top; bottom] row-wise.
Matrix vstack(const Matrix& top, const Matrix& bottom);
Vector vstack(const Vector& top, const Vector& bottom);

}  // namespace icls
