#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace ssbayes {

/// A symmetric positive-definite matrix with its Cholesky factor cached.
///
/// Construction symmetrizes the input as (A + A^T)/2, warning on stderr when
/// the relative asymmetry exceeds 1e-8, and then requires the Cholesky
/// factorization to succeed; failure throws InvalidParameter. Positive
/// definiteness is thus checked operationally rather than via eigenvalues.
class SpdMatrix {
 public:
  explicit SpdMatrix(Eigen::MatrixXd m);

  /// d x d identity.
  static SpdMatrix identity(int dim);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Eigen::MatrixXd& matrix() const { return mat_; }
  const Eigen::LLT<Eigen::MatrixXd>& llt() const { return llt_; }

  /// Lower Cholesky factor L with mat = L L^T.
  Eigen::MatrixXd cholesky_lower() const { return llt_.matrixL(); }

  /// log det(mat), from the cached factor.
  double log_det() const;

  /// mat^{-1} b.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return llt_.solve(b); }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const { return llt_.solve(b); }

 private:
  Eigen::MatrixXd mat_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

}  // namespace ssbayes
