#include "ssbayes/samplers.hpp"

#include <cmath>
#include <numbers>

#include "ssbayes/errors.hpp"

namespace ssbayes {

Eigen::VectorXd sample_dirichlet(const Eigen::VectorXd& alpha, RngState& rng) {
  const auto n = alpha.size();
  if (n == 0) throw InvalidParameter("dirichlet alpha must be non-empty");
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(alpha[j] > 0.0)) {
      throw InvalidParameter("dirichlet alpha entries must be > 0");
    }
  }
  Eigen::VectorXd g(n);
  for (Eigen::Index j = 0; j < n; ++j) g[j] = rng.gamma(alpha[j]);
  const double total = g.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    Eigen::Index imax = 0;
    alpha.maxCoeff(&imax);
    g.setZero();
    g[imax] = 1.0;
    return g;
  }
  return g / total;
}

SpdMatrix sample_inverse_wishart(double dof, const SpdMatrix& scale, RngState& rng) {
  const int p = scale.dim();
  if (!(dof > p - 1)) {
    throw InvalidParameter("inverse-Wishart dof must exceed dim - 1");
  }
  // Bartlett construction of W ~ Wishart(dof, scale^{-1}); the returned
  // matrix is W^{-1} ~ IW(dof, scale).
  const Eigen::MatrixXd scale_inv =
      scale.solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (scale_inv + scale_inv.transpose()));
  const Eigen::MatrixXd L = llt.matrixL();

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    A(i, i) = std::sqrt(rng.chi_square(dof - i));
    for (int j = 0; j < i; ++j) A(i, j) = rng.normal();
  }
  const Eigen::MatrixXd T = L * A;
  const Eigen::MatrixXd W = T * T.transpose();
  const Eigen::MatrixXd W_inv =
      Eigen::LLT<Eigen::MatrixXd>(W).solve(Eigen::MatrixXd::Identity(p, p));
  return SpdMatrix(W_inv);
}

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mu, const SpdMatrix& sigma,
                           RngState& rng) {
  if (mu.size() != sigma.dim()) {
    throw InvalidParameter("sample_mvn: dim(mu) != dim(sigma)");
  }
  Eigen::VectorXd z(mu.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return mu + sigma.cholesky_lower() * z;
}

double mvn_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                  const SpdMatrix& sigma) {
  if (x.size() != mu.size() || x.size() != sigma.dim()) {
    throw InvalidParameter("mvn_logpdf: non-conformable dimensions");
  }
  const Eigen::VectorXd diff = x - mu;
  const Eigen::VectorXd alpha =
      sigma.llt().matrixL().solve(diff);  // L^{-1}(x - mu)
  const double d = static_cast<double>(x.size());
  return -0.5 * (d * std::log(2.0 * std::numbers::pi) + sigma.log_det() +
                 alpha.squaredNorm());
}

namespace {

// Standard normal truncated to z > lower.
double truncated_std_normal_above(double lower, RngState& rng) {
  if (lower <= 0.0) {
    for (;;) {
      const double z = rng.normal();
      if (z > lower) return z;
    }
  }
  // Shifted-exponential rejection for truncation points in the upper tail.
  const double lambda = 0.5 * (lower + std::sqrt(lower * lower + 4.0));
  for (;;) {
    const double z = lower - std::log(rng.uniform()) / lambda;
    const double d = z - lambda;
    if (std::log(rng.uniform()) <= -0.5 * d * d) return z;
  }
}

}  // namespace

double sample_truncated_normal(double mu, double sigma, bool positive_side,
                               RngState& rng) {
  if (!(sigma > 0.0)) {
    throw InvalidParameter("truncated normal sigma must be > 0");
  }
  if (positive_side) {
    const double z = truncated_std_normal_above(-mu / sigma, rng);
    return mu + sigma * z;
  }
  const double z = truncated_std_normal_above(mu / sigma, rng);
  return -(-mu + sigma * z);
}

}  // namespace ssbayes
