#include "ssbayes/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ssbayes/errors.hpp"

namespace ssbayes {

double log_sum_exp(const Eigen::VectorXd& v) {
  if (v.size() == 0) return -std::numeric_limits<double>::infinity();
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidParameter("percentile of empty sample");
  if (p < 0.0 || p > 1.0) throw InvalidParameter("percentile p outside [0,1]");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double pearson_correlation(const std::vector<double>& a,
                           const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw InvalidParameter("pearson_correlation needs two samples of equal size >= 2");
  }
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

namespace {

// Row-mean and grand-mean pass for one sample's pairwise distance structure.
struct DistanceStats {
  std::vector<double> row_mean;
  double grand_mean = 0.0;
};

double pair_distance(const Eigen::MatrixXd& m, Eigen::Index i, Eigen::Index j) {
  return (m.row(i) - m.row(j)).norm();
}

DistanceStats distance_stats(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  DistanceStats st;
  st.row_mean.assign(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = pair_distance(m, i, j);
      st.row_mean[static_cast<std::size_t>(i)] += d;
      st.row_mean[static_cast<std::size_t>(j)] += d;
    }
  }
  for (auto& r : st.row_mean) {
    st.grand_mean += r;
    r /= static_cast<double>(n);
  }
  st.grand_mean /= static_cast<double>(n) * static_cast<double>(n);
  return st;
}

// dCov^2, dVar_x^2, dVar_y^2 accumulated in one pairwise sweep. `perm` maps
// row i of x to row perm[i] of y (identity for the unpermuted statistic).
void dcov_terms(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                const DistanceStats& sx, const DistanceStats& sy,
                const std::vector<Eigen::Index>& perm, double* dcov2,
                double* dvarx2, double* dvary2) {
  const Eigen::Index n = x.rows();
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const auto pi = static_cast<std::size_t>(perm[iu]);
    // Diagonal terms: distance 0.
    {
      const double a = -sx.row_mean[iu] - sx.row_mean[iu] + sx.grand_mean;
      const double b = -sy.row_mean[pi] - sy.row_mean[pi] + sy.grand_mean;
      sxy += a * b;
      sxx += a * a;
      syy += b * b;
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const auto pj = static_cast<std::size_t>(perm[ju]);
      const double a = pair_distance(x, i, j) - sx.row_mean[iu] -
                       sx.row_mean[ju] + sx.grand_mean;
      const double b = pair_distance(y, perm[iu], perm[ju]) -
                       sy.row_mean[pi] - sy.row_mean[pj] + sy.grand_mean;
      sxy += 2.0 * a * b;
      sxx += 2.0 * a * a;
      syy += 2.0 * b * b;
    }
  }
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  *dcov2 = sxy / n2;
  *dvarx2 = sxx / n2;
  *dvary2 = syy / n2;
}

double dcor_from_terms(double dcov2, double dvarx2, double dvary2) {
  const double denom = std::sqrt(dvarx2 * dvary2);
  if (denom <= 0.0) return 0.0;
  const double r2 = dcov2 / denom;
  return r2 > 0.0 ? std::sqrt(r2) : 0.0;
}

}  // namespace

double distance_correlation(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.rows() != y.rows() || x.rows() < 2) {
    throw InvalidParameter("distance_correlation needs matching row counts >= 2");
  }
  const DistanceStats sx = distance_stats(x);
  const DistanceStats sy = distance_stats(y);
  std::vector<Eigen::Index> identity(static_cast<std::size_t>(x.rows()));
  std::iota(identity.begin(), identity.end(), Eigen::Index{0});
  double dcov2, dvarx2, dvary2;
  dcov_terms(x, y, sx, sy, identity, &dcov2, &dvarx2, &dvary2);
  return dcor_from_terms(dcov2, dvarx2, dvary2);
}

PermutationTestResult distance_correlation_permutation_test(
    const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int n_permutations,
    RngState& rng) {
  if (n_permutations < 1) {
    throw InvalidParameter("permutation test needs n_permutations >= 1");
  }
  const Eigen::Index n = x.rows();
  const DistanceStats sx = distance_stats(x);
  const DistanceStats sy = distance_stats(y);

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});

  double dcov2, dvarx2, dvary2;
  dcov_terms(x, y, sx, sy, perm, &dcov2, &dvarx2, &dvary2);
  const double observed = dcor_from_terms(dcov2, dvarx2, dvary2);

  std::vector<double> null_stats;
  null_stats.reserve(static_cast<std::size_t>(n_permutations));
  int n_ge = 0;
  for (int b = 0; b < n_permutations; ++b) {
    // Fisher-Yates on the y-row assignment.
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
      std::swap(perm[i], perm[j]);
    }
    dcov_terms(x, y, sx, sy, perm, &dcov2, &dvarx2, &dvary2);
    const double stat = dcor_from_terms(dcov2, dvarx2, dvary2);
    null_stats.push_back(stat);
    if (stat >= observed) ++n_ge;
  }

  PermutationTestResult out;
  out.statistic = observed;
  out.threshold = percentile(null_stats, 0.95);
  out.p_value = (1.0 + n_ge) / (1.0 + static_cast<double>(n_permutations));
  out.reject_at_5pct = out.p_value <= 0.05;
  return out;
}

}  // namespace ssbayes
