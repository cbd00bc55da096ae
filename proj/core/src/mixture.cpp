#include "ssbayes/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ssbayes/errors.hpp"
#include "ssbayes/stats.hpp"

namespace ssbayes {

GaussianComponent::GaussianComponent(Eigen::VectorXd mu_in, SpdMatrix sigma_in)
    : mu(std::move(mu_in)), sigma(std::move(sigma_in)) {
  if (mu.size() != sigma.dim()) {
    throw InvalidParameter("GaussianComponent: dim(mu) != dim(sigma)");
  }
}

void MixtureParams::validate() const {
  if (components.empty()) throw InvalidParameter("mixture needs >= 1 component");
  if (weights.size() != static_cast<Eigen::Index>(components.size())) {
    throw InvalidParameter("mixture weight/component count mismatch");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-8 || weights.minCoeff() < -1e-12) {
    throw InvalidParameter("mixture weights must form a simplex");
  }
  const int d = components.front().dim();
  for (const auto& c : components) {
    if (c.dim() != d) throw InvalidParameter("mixture components must share dim");
  }
}

void NIWMixturePrior::validate() const {
  if (dirichlet_alpha.size() < 1 || dirichlet_alpha.minCoeff() <= 0.0) {
    throw InvalidParameter("NIW prior: dirichlet_alpha must be positive");
  }
  if (!(tau > 0.0)) throw InvalidParameter("NIW prior: tau must be > 0");
  if (!(iw_dof > iw_scale.dim() - 1)) {
    throw InvalidParameter("NIW prior: iw_dof must exceed dim - 1");
  }
}

int SemiSupDataset::x_dim() const {
  if (!labeled.empty()) return static_cast<int>(labeled.front().x.size());
  if (!unlabeled_x.empty()) return static_cast<int>(unlabeled_x.front().size());
  return 0;
}

void SemiSupDataset::validate() const {
  const int d = x_dim();
  for (const auto& obs : labeled) {
    if (static_cast<int>(obs.x.size()) != d) {
      throw InvalidData("labeled x dimensions are inconsistent");
    }
  }
  for (const auto& x : unlabeled_x) {
    if (static_cast<int>(x.size()) != d) {
      throw InvalidData("unlabeled x dimensions are inconsistent");
    }
  }
}

namespace {

// Log density of the x-marginal of a component, where x is the trailing
// block (all coordinates after the leading y).
double marginal_x_logpdf(const GaussianComponent& c, const Eigen::VectorXd& x) {
  const int dx = static_cast<int>(x.size());
  const int d = c.dim();
  const Eigen::VectorXd mu_x = c.mu.tail(dx);
  const SpdMatrix sigma_x(c.sigma.matrix().bottomRightCorner(dx, dx));
  (void)d;
  return mvn_logpdf(x, mu_x, sigma_x);
}

Eigen::VectorXd log_component_weights(const MixtureParams& params,
                                      const Eigen::VectorXd& x) {
  const int m = params.n_components();
  const int d = params.components.front().dim();
  const int dx = static_cast<int>(x.size());
  if (dx != d && dx != d - 1) {
    throw InvalidParameter("conditional_mixture_weights: x dim must match the "
                           "component dim or its x-block");
  }
  Eigen::VectorXd logw(m);
  for (int i = 0; i < m; ++i) {
    const double logpi = params.weights[i] > 0.0
                             ? std::log(params.weights[i])
                             : -std::numeric_limits<double>::infinity();
    const double logf = (dx == d)
                            ? mvn_logpdf(x, params.components[i].mu,
                                         params.components[i].sigma)
                            : marginal_x_logpdf(params.components[i], x);
    logw[i] = logpi + logf;
  }
  return logw;
}

Eigen::VectorXd normalize_log_weights(const Eigen::VectorXd& logw,
                                      const Eigen::VectorXd& fallback) {
  const double lse = log_sum_exp(logw);
  if (!std::isfinite(lse)) {
    // Every density underflowed; the common factor carries no information.
    return fallback / fallback.sum();
  }
  Eigen::VectorXd w(logw.size());
  for (Eigen::Index i = 0; i < logw.size(); ++i) w[i] = std::exp(logw[i] - lse);
  return w / w.sum();
}

int sample_categorical(const Eigen::VectorXd& probs, RngState& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u <= acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size() - 1);
}

GaussianComponent draw_component_from_prior(const NIWMixturePrior& prior,
                                            RngState& rng) {
  SpdMatrix sigma = sample_inverse_wishart(prior.iw_dof, prior.iw_scale, rng);
  const SpdMatrix mu_cov(prior.tau * sigma.matrix());
  Eigen::VectorXd mu =
      sample_mvn(Eigen::VectorXd::Zero(sigma.dim()), mu_cov, rng);
  return GaussianComponent(std::move(mu), std::move(sigma));
}

// Conjugate NIW full conditional given the observations allocated to one
// component. With kappa0 = 1/tau and prior mean 0:
//   kappa_n = kappa0 + n, m_n = n xbar / kappa_n, d_n = d0 + n,
//   S_n = S0 + scatter + (kappa0 n / kappa_n) xbar xbar'.
GaussianComponent draw_component_conditional(
    const std::vector<const Eigen::VectorXd*>& obs, const NIWMixturePrior& prior,
    RngState& rng) {
  if (obs.empty()) return draw_component_from_prior(prior, rng);
  const int d = prior.iw_scale.dim();
  const double n = static_cast<double>(obs.size());
  const double kappa0 = 1.0 / prior.tau;

  Eigen::VectorXd xbar = Eigen::VectorXd::Zero(d);
  for (const auto* v : obs) xbar += *v;
  xbar /= n;

  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
  for (const auto* v : obs) {
    const Eigen::VectorXd c = *v - xbar;
    scatter += c * c.transpose();
  }

  const double kappa_n = kappa0 + n;
  const Eigen::VectorXd m_n = (n / kappa_n) * xbar;
  const double d_n = prior.iw_dof + n;
  const Eigen::MatrixXd s_n = prior.iw_scale.matrix() + scatter +
                              (kappa0 * n / kappa_n) * (xbar * xbar.transpose());

  SpdMatrix sigma = sample_inverse_wishart(d_n, SpdMatrix(s_n), rng);
  const SpdMatrix mu_cov(sigma.matrix() / kappa_n);
  Eigen::VectorXd mu = sample_mvn(m_n, mu_cov, rng);
  return GaussianComponent(std::move(mu), std::move(sigma));
}

}  // namespace

Eigen::VectorXd conditional_mixture_weights(const MixtureParams& params,
                                            const Eigen::VectorXd& x) {
  params.validate();
  return normalize_log_weights(log_component_weights(params, x), params.weights);
}

ConditionalDecomposition joint_to_conditional(const GaussianComponent& joint) {
  const int d = joint.dim();
  if (d < 2) throw InvalidParameter("joint_to_conditional needs dim >= 2");
  const int dx = d - 1;
  const double sigma_yy = joint.sigma.matrix()(0, 0);
  const Eigen::VectorXd rho = joint.sigma.matrix().block(1, 0, dx, 1);
  const SpdMatrix sigma_x(joint.sigma.matrix().bottomRightCorner(dx, dx));

  Eigen::VectorXd beta = sigma_x.solve(rho);
  const double residual_var = sigma_yy - beta.dot(rho);
  const double mu_y = joint.mu[0];
  const Eigen::VectorXd mu_x = joint.mu.tail(dx);

  ConditionalDecomposition out{GaussianComponent(mu_x, sigma_x), std::move(beta),
                               0.0, residual_var};
  out.intercept = mu_y - out.beta.dot(mu_x);
  return out;
}

GibbsState gibbs_step(const GibbsState& state, const SemiSupDataset& data,
                      const NIWMixturePrior& prior, RngState& rng) {
  const int m = prior.n_components();
  const bool regression = state.mode == MixtureMode::kRegression;
  const int joint_dim = prior.iw_scale.dim();
  const int dx = regression ? joint_dim - 1 : joint_dim;
  if (data.x_dim() != 0 && data.x_dim() != dx) {
    throw InvalidData("dataset x dim incompatible with the prior scale dim");
  }
  if (state.alloc_labeled.size() != data.labeled.size() ||
      state.alloc_unlabeled.size() != data.unlabeled_x.size()) {
    throw InvalidData("GibbsState allocation sizes do not match the dataset");
  }

  GibbsState next = state;

  // (a) reallocation.
  for (std::size_t i = 0; i < data.labeled.size(); ++i) {
    if (regression) {
      Eigen::VectorXd v(joint_dim);
      v[0] = data.labeled[i].y;
      v.tail(dx) = data.labeled[i].x;
      const Eigen::VectorXd w = normalize_log_weights(
          log_component_weights(next.params, v), next.params.weights);
      next.alloc_labeled[i] = sample_categorical(w, rng);
    } else {
      const int label = static_cast<int>(data.labeled[i].y);
      if (label < 0 || label >= m || data.labeled[i].y != label) {
        throw InvalidData("discriminant mode labels must be component indices");
      }
      next.alloc_labeled[i] = label;
    }
  }
  for (std::size_t i = 0; i < data.unlabeled_x.size(); ++i) {
    const Eigen::VectorXd w = normalize_log_weights(
        log_component_weights(next.params, data.unlabeled_x[i]),
        next.params.weights);
    next.alloc_unlabeled[i] = sample_categorical(w, rng);
  }

  // (b) impute missing responses from the allocated component's y|x law.
  if (regression) {
    next.imputed_y.resize(data.unlabeled_x.size());
    for (std::size_t i = 0; i < data.unlabeled_x.size(); ++i) {
      const auto cond = joint_to_conditional(
          next.params.components[static_cast<std::size_t>(next.alloc_unlabeled[i])]);
      const double mean = cond.intercept + cond.beta.dot(data.unlabeled_x[i]);
      next.imputed_y[i] = mean + std::sqrt(cond.residual_var) * rng.normal();
    }
  }

  // (c) mixture weights from the Dirichlet full conditional.
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(m);
  for (int a : next.alloc_labeled) counts[a] += 1.0;
  for (int a : next.alloc_unlabeled) counts[a] += 1.0;
  next.params.weights = sample_dirichlet(prior.dirichlet_alpha + counts, rng);

  // (d) per-component NIW full conditionals over the allocated observations.
  std::vector<Eigen::VectorXd> joint_rows;
  joint_rows.reserve(data.labeled.size() + data.unlabeled_x.size());
  std::vector<int> joint_alloc;
  joint_alloc.reserve(joint_rows.capacity());
  for (std::size_t i = 0; i < data.labeled.size(); ++i) {
    if (regression) {
      Eigen::VectorXd v(joint_dim);
      v[0] = data.labeled[i].y;
      v.tail(dx) = data.labeled[i].x;
      joint_rows.push_back(std::move(v));
    } else {
      joint_rows.push_back(data.labeled[i].x);
    }
    joint_alloc.push_back(next.alloc_labeled[i]);
  }
  for (std::size_t i = 0; i < data.unlabeled_x.size(); ++i) {
    if (regression) {
      Eigen::VectorXd v(joint_dim);
      v[0] = next.imputed_y[i];
      v.tail(dx) = data.unlabeled_x[i];
      joint_rows.push_back(std::move(v));
    } else {
      joint_rows.push_back(data.unlabeled_x[i]);
    }
    joint_alloc.push_back(next.alloc_unlabeled[i]);
  }

  next.params.components.clear();
  next.params.components.reserve(static_cast<std::size_t>(m));
  for (int c = 0; c < m; ++c) {
    std::vector<const Eigen::VectorXd*> members;
    for (std::size_t i = 0; i < joint_rows.size(); ++i) {
      if (joint_alloc[i] == c) members.push_back(&joint_rows[i]);
    }
    next.params.components.push_back(
        draw_component_conditional(members, prior, rng));
  }
  return next;
}

namespace {

// Small Lloyd pass over pooled x values; returns a cluster index per point.
std::vector<int> kmeans_allocations(const std::vector<Eigen::VectorXd>& points,
                                    int k, RngState& rng) {
  std::vector<int> alloc(points.size(), 0);
  if (points.empty() || k <= 1) return alloc;

  // k-means++ style seeding.
  std::vector<Eigen::VectorXd> centers;
  centers.push_back(points[rng.next_u64() % points.size()]);
  while (static_cast<int>(centers.size()) < k) {
    std::vector<double> d2(points.size());
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, (points[i] - c).squaredNorm());
      d2[i] = best;
      total += best;
    }
    std::size_t chosen = 0;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (std::size_t i = 0; i < points.size(); ++i) {
        u -= d2[i];
        if (u <= 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = rng.next_u64() % points.size();
    }
    centers.push_back(points[chosen]);
  }

  for (int iter = 0; iter < 10; ++iter) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points[i] - centers[static_cast<std::size_t>(c)]).squaredNorm();
        if (d < best) {
          best = d;
          alloc[i] = c;
        }
      }
    }
    for (int c = 0; c < k; ++c) {
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(points.front().size());
      int n = 0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (alloc[i] == c) {
          sum += points[i];
          ++n;
        }
      }
      if (n > 0) centers[static_cast<std::size_t>(c)] = sum / n;
    }
  }
  return alloc;
}

}  // namespace

std::vector<MixtureParams> fit_mixture(const SemiSupDataset& data,
                                       const NIWMixturePrior& prior,
                                       const MixtureFitOptions& options,
                                       RngState& rng) {
  prior.validate();
  data.validate();
  if (options.n_keep < 1) throw InvalidParameter("fit_mixture: n_keep must be >= 1");
  if (options.thin < 1) throw InvalidParameter("fit_mixture: thin must be >= 1");
  if (options.n_burn < 0) throw InvalidParameter("fit_mixture: n_burn must be >= 0");

  const int m = prior.n_components();
  const bool regression = options.mode == MixtureMode::kRegression;

  GibbsState state;
  state.mode = options.mode;

  // Initial allocations: k-means over pooled x, except that discriminant
  // labels pin their own allocation.
  std::vector<Eigen::VectorXd> pooled;
  pooled.reserve(data.labeled.size() + data.unlabeled_x.size());
  for (const auto& obs : data.labeled) pooled.push_back(obs.x);
  for (const auto& x : data.unlabeled_x) pooled.push_back(x);
  const std::vector<int> km = kmeans_allocations(pooled, m, rng);

  state.alloc_labeled.resize(data.labeled.size());
  state.alloc_unlabeled.resize(data.unlabeled_x.size());
  for (std::size_t i = 0; i < data.labeled.size(); ++i) {
    state.alloc_labeled[i] =
        regression ? km[i] : static_cast<int>(data.labeled[i].y);
    if (state.alloc_labeled[i] < 0 || state.alloc_labeled[i] >= m) {
      throw InvalidData("labels must index a mixture component");
    }
  }
  for (std::size_t i = 0; i < data.unlabeled_x.size(); ++i) {
    state.alloc_unlabeled[i] = km[data.labeled.size() + i];
  }

  if (regression) {
    // Imputed responses start at the within-cluster labeled means.
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd cnt = Eigen::VectorXd::Zero(m);
    double global_sum = 0.0;
    for (std::size_t i = 0; i < data.labeled.size(); ++i) {
      sum[state.alloc_labeled[i]] += data.labeled[i].y;
      cnt[state.alloc_labeled[i]] += 1.0;
      global_sum += data.labeled[i].y;
    }
    const double global_mean =
        data.labeled.empty() ? 0.0 : global_sum / data.labeled.size();
    state.imputed_y.resize(data.unlabeled_x.size());
    for (std::size_t i = 0; i < data.unlabeled_x.size(); ++i) {
      const int c = state.alloc_unlabeled[i];
      state.imputed_y[i] = cnt[c] > 0.0 ? sum[c] / cnt[c] : global_mean;
    }
  }

  // Initial parameters from the full conditionals given those allocations:
  // a placeholder parameter set is immediately overwritten by the first sweep,
  // so draw weights and components directly here.
  {
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(m);
    for (int a : state.alloc_labeled) counts[a] += 1.0;
    for (int a : state.alloc_unlabeled) counts[a] += 1.0;
    state.params.weights = sample_dirichlet(prior.dirichlet_alpha + counts, rng);

    const int joint_dim = prior.iw_scale.dim();
    std::vector<Eigen::VectorXd> rows;
    std::vector<int> alloc;
    for (std::size_t i = 0; i < data.labeled.size(); ++i) {
      if (regression) {
        Eigen::VectorXd v(joint_dim);
        v[0] = data.labeled[i].y;
        v.tail(joint_dim - 1) = data.labeled[i].x;
        rows.push_back(std::move(v));
      } else {
        rows.push_back(data.labeled[i].x);
      }
      alloc.push_back(state.alloc_labeled[i]);
    }
    for (std::size_t i = 0; i < data.unlabeled_x.size(); ++i) {
      if (regression) {
        Eigen::VectorXd v(joint_dim);
        v[0] = state.imputed_y[i];
        v.tail(joint_dim - 1) = data.unlabeled_x[i];
        rows.push_back(std::move(v));
      } else {
        rows.push_back(data.unlabeled_x[i]);
      }
      alloc.push_back(state.alloc_unlabeled[i]);
    }
    for (int c = 0; c < m; ++c) {
      std::vector<const Eigen::VectorXd*> members;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (alloc[i] == c) members.push_back(&rows[i]);
      }
      state.params.components.push_back(
          draw_component_conditional(members, prior, rng));
    }
  }

  std::vector<MixtureParams> kept;
  kept.reserve(static_cast<std::size_t>(options.n_keep));
  const long total = static_cast<long>(options.n_burn) +
                     static_cast<long>(options.n_keep) * options.thin;
  for (long s = 1; s <= total; ++s) {
    state = gibbs_step(state, data, prior, rng);
    if (s > options.n_burn && (s - options.n_burn) % options.thin == 0) {
      kept.push_back(state.params);
    }
  }
  return kept;
}

std::vector<double> predictive_regression_curve(
    const std::vector<MixtureParams>& samples,
    const std::vector<Eigen::VectorXd>& x_grid) {
  if (samples.empty() || x_grid.empty()) {
    throw InvalidParameter("predictive_regression_curve: empty samples or grid");
  }
  std::vector<double> curve(x_grid.size(), 0.0);
  for (const auto& params : samples) {
    // Cache per-component conditionals and the x-marginal mixture.
    std::vector<ConditionalDecomposition> cond;
    cond.reserve(params.components.size());
    MixtureParams marginal;
    marginal.weights = params.weights;
    for (const auto& comp : params.components) {
      cond.push_back(joint_to_conditional(comp));
      marginal.components.push_back(cond.back().x_marginal);
    }
    for (std::size_t g = 0; g < x_grid.size(); ++g) {
      const Eigen::VectorXd w = conditional_mixture_weights(marginal, x_grid[g]);
      double mean = 0.0;
      for (std::size_t i = 0; i < cond.size(); ++i) {
        mean += w[static_cast<Eigen::Index>(i)] *
                (cond[i].intercept + cond[i].beta.dot(x_grid[g]));
      }
      curve[g] += mean;
    }
  }
  for (auto& v : curve) v /= static_cast<double>(samples.size());
  return curve;
}

std::vector<double> predictive_density(const std::vector<MixtureParams>& samples,
                                       const Eigen::VectorXd& x_star,
                                       const std::vector<double>& y_grid) {
  if (samples.empty() || y_grid.empty()) {
    throw InvalidParameter("predictive_density: empty samples or grid");
  }
  std::vector<double> dens(y_grid.size(), 0.0);
  for (const auto& params : samples) {
    std::vector<ConditionalDecomposition> cond;
    cond.reserve(params.components.size());
    MixtureParams marginal;
    marginal.weights = params.weights;
    for (const auto& comp : params.components) {
      cond.push_back(joint_to_conditional(comp));
      marginal.components.push_back(cond.back().x_marginal);
    }
    const Eigen::VectorXd w = conditional_mixture_weights(marginal, x_star);
    for (std::size_t g = 0; g < y_grid.size(); ++g) {
      double p = 0.0;
      for (std::size_t i = 0; i < cond.size(); ++i) {
        const double mean = cond[i].intercept + cond[i].beta.dot(x_star);
        const double var = cond[i].residual_var;
        const double z = y_grid[g] - mean;
        p += w[static_cast<Eigen::Index>(i)] *
             std::exp(-0.5 * z * z / var) /
             std::sqrt(2.0 * std::numbers::pi * var);
      }
      dens[g] += p;
    }
  }
  for (auto& v : dens) v /= static_cast<double>(samples.size());
  return dens;
}

double classify(const std::vector<MixtureParams>& samples,
                const Eigen::VectorXd& x_star) {
  if (samples.empty()) throw InvalidParameter("classify: empty sample set");
  double acc = 0.0;
  for (const auto& params : samples) {
    if (params.n_components() != 2) {
      throw InvalidParameter("classify requires two-class discriminant draws");
    }
    const Eigen::VectorXd w = conditional_mixture_weights(params, x_star);
    acc += w[1];
  }
  return acc / static_cast<double>(samples.size());
}

}  // namespace ssbayes
