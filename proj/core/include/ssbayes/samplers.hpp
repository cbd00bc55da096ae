#pragma once

#include <Eigen/Dense>

#include "ssbayes/rng.hpp"
#include "ssbayes/spd_matrix.hpp"

namespace ssbayes {

/// Dirichlet draw: gamma variates normalized to the simplex.
/// All alpha entries must be > 0. If every gamma draw underflows to zero
/// (possible only for uniformly tiny alphas), the mass is placed on the
/// largest alpha entry, which is the correct degenerate limit.
Eigen::VectorXd sample_dirichlet(const Eigen::VectorXd& alpha, RngState& rng);

/// Inverse-Wishart draw, IW(dof, scale).
///
/// Parameterization (pinned; the literature is not consistent about this):
///   p(S) proportional to |S|^{-(dof+p+1)/2} exp(-tr(scale S^{-1})/2)
/// for p x p matrices, so E[S] = scale / (dof - p - 1) whenever dof > p + 1.
/// Sampled as the inverse of a Wishart(dof, scale^{-1}) Bartlett draw.
/// Requires dof > p - 1; smaller dof throws InvalidParameter.
SpdMatrix sample_inverse_wishart(double dof, const SpdMatrix& scale, RngState& rng);

/// One draw from N(mu, sigma), constructed as mu + L z with L the lower
/// Cholesky factor of sigma and z iid standard normal.
Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mu, const SpdMatrix& sigma,
                           RngState& rng);

/// Exact log-density of N(mu, sigma) at x.
double mvn_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                  const SpdMatrix& sigma);

/// N(mu, sigma^2) truncated to one side of zero: the strictly positive
/// half-line when positive_side is true, strictly negative otherwise.
/// Robert (1995): plain rejection when the truncation point sits below the
/// mode, shifted-exponential rejection deep in the tail.
double sample_truncated_normal(double mu, double sigma, bool positive_side,
                               RngState& rng);

}  // namespace ssbayes
