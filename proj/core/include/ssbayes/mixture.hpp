#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ssbayes/rng.hpp"
#include "ssbayes/samplers.hpp"
#include "ssbayes/spd_matrix.hpp"

namespace ssbayes {

/// One Gaussian mixture component.
struct GaussianComponent {
  Eigen::VectorXd mu;
  SpdMatrix sigma;

  GaussianComponent(Eigen::VectorXd mu_in, SpdMatrix sigma_in);
  int dim() const { return static_cast<int>(mu.size()); }
};

/// Finite Gaussian mixture over the joint (y, x) space, with y as the first
/// coordinate of each component; or, in discriminant mode, a mixture over x
/// alone where component identity is the class label and weights are the
/// class probabilities.
struct MixtureParams {
  Eigen::VectorXd weights;
  std::vector<GaussianComponent> components;

  int n_components() const { return static_cast<int>(components.size()); }
  void validate() const;
};

/// Conjugate normal-inverse-Wishart mixture prior:
///   pi ~ Dir(dirichlet_alpha),
///   sigma_i ~ IW(iw_dof, iw_scale),
///   mu_i | sigma_i ~ N(0, tau * sigma_i).
struct NIWMixturePrior {
  Eigen::VectorXd dirichlet_alpha;
  double tau;
  double iw_dof;
  SpdMatrix iw_scale;

  int n_components() const { return static_cast<int>(dirichlet_alpha.size()); }
  void validate() const;
};

struct LabeledObs {
  double y;           // response (regression) or class label 0/1 (discriminant)
  Eigen::VectorXd x;
};

/// Labeled pairs plus response-free covariate rows.
struct SemiSupDataset {
  std::vector<LabeledObs> labeled;
  std::vector<Eigen::VectorXd> unlabeled_x;

  int x_dim() const;
  void validate() const;
};

enum class MixtureMode {
  kRegression,    // components over (y, x); unlabeled y imputed as missing data
  kDiscriminant,  // components over x; labeled allocations pinned to the label
};

/// Full state of one Gibbs chain.
struct GibbsState {
  MixtureMode mode = MixtureMode::kRegression;
  MixtureParams params;
  std::vector<int> alloc_labeled;    // component index per labeled obs
  std::vector<int> alloc_unlabeled;  // component index per unlabeled obs
  std::vector<double> imputed_y;     // per unlabeled obs; regression mode only
};

/// w_i(x) = pi_i f_i(x) / sum_j pi_j f_j(x), evaluated in log space.
///
/// If x has the full component dimension, f_i is the component density
/// itself; if x is one short, f_i is the x-marginal (all coordinates after
/// the leading y). Never returns NaN: total underflow is handled by the
/// log-space reduction.
Eigen::VectorXd conditional_mixture_weights(const MixtureParams& params,
                                            const Eigen::VectorXd& x);

/// The x-marginal and y|x regression implied by a joint (y, x) component.
struct ConditionalDecomposition {
  GaussianComponent x_marginal;
  Eigen::VectorXd beta;  // regression coefficients on x
  double intercept;      // mu_y - beta' mu_x
  double residual_var;   // sigma_y^2 - beta' rho, > 0 for SPD joints
};
ConditionalDecomposition joint_to_conditional(const GaussianComponent& joint);

/// One full Gibbs sweep: reallocate labeled obs by joint density and
/// unlabeled obs by x-marginal density, impute missing responses (regression
/// mode), then redraw weights and every component from the conjugate full
/// conditionals. Components with no allocations are redrawn from the prior.
GibbsState gibbs_step(const GibbsState& state, const SemiSupDataset& data,
                      const NIWMixturePrior& prior, RngState& rng);

struct MixtureFitOptions {
  int n_burn = 2000;
  int n_keep = 2000;
  int thin = 2;
  MixtureMode mode = MixtureMode::kRegression;
};

/// Run a full chain and keep n_keep thinned posterior parameter draws.
/// Allocations are initialized by a small k-means pass over the pooled x
/// values; imputed responses start at the cluster means of the labeled data.
std::vector<MixtureParams> fit_mixture(const SemiSupDataset& data,
                                       const NIWMixturePrior& prior,
                                       const MixtureFitOptions& options,
                                       RngState& rng);

/// Rao-Blackwellized posterior mean regression curve: per grid point the
/// average over parameter draws of sum_i w_i(x) E_i(y | x).
std::vector<double> predictive_regression_curve(
    const std::vector<MixtureParams>& samples,
    const std::vector<Eigen::VectorXd>& x_grid);

/// Posterior predictive density p(y | x*) on a y grid, averaged over draws.
std::vector<double> predictive_density(const std::vector<MixtureParams>& samples,
                                       const Eigen::VectorXd& x_star,
                                       const std::vector<double>& y_grid);

/// Two-class discriminant: posterior mean of Pr(y* = 1 | x*), i.e. the
/// average over draws of w_1(x*) for components (class 0, class 1) over x.
double classify(const std::vector<MixtureParams>& samples,
                const Eigen::VectorXd& x_star);

}  // namespace ssbayes
