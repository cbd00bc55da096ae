#include "ssbayes/spd_matrix.hpp"

#include <cmath>
#include <iostream>

#include "ssbayes/errors.hpp"

namespace ssbayes {

SpdMatrix::SpdMatrix(Eigen::MatrixXd m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw InvalidParameter("SpdMatrix requires a non-empty square matrix");
  }
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && asym > 1e-8 * scale) {
    std::cerr << "ssbayes: symmetrizing matrix with relative asymmetry "
              << asym / scale << "\n";
  }
  mat_ = 0.5 * (m + m.transpose());
  llt_.compute(mat_);
  if (llt_.info() != Eigen::Success) {
    throw InvalidParameter("matrix is not positive definite (Cholesky failed)");
  }
}

SpdMatrix SpdMatrix::identity(int dim) {
  return SpdMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

double SpdMatrix::log_det() const {
  const Eigen::MatrixXd L = llt_.matrixL();
  double s = 0.0;
  for (int i = 0; i < L.rows(); ++i) s += std::log(L(i, i));
  return 2.0 * s;
}

}  // namespace ssbayes
