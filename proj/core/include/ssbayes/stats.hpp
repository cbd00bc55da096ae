#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ssbayes/rng.hpp"

namespace ssbayes {

/// log(sum_i exp(v_i)) with the usual max shift; -inf input rows are fine.
double log_sum_exp(const Eigen::VectorXd& v);

/// Standard normal CDF.
double normal_cdf(double x);

/// Linear-interpolation percentile of a copy-sorted sample, p in [0, 1].
double percentile(std::vector<double> values, double p);

/// Pearson correlation of two equally sized samples.
double pearson_correlation(const std::vector<double>& a,
                           const std::vector<double>& b);

/// Sample distance correlation between row samples X (n x px) and Y (n x py).
/// O(n^2) time, O(n) memory (distance matrices are never materialized).
/// Returns a value in [0, 1]; 0 iff empirically independent in the dCov sense.
double distance_correlation(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

struct PermutationTestResult {
  double statistic = 0.0;       // observed distance correlation
  double threshold = 0.0;       // permutation-null 95th percentile
  double p_value = 1.0;         // (1 + #{perm >= obs}) / (1 + n_permutations)
  bool reject_at_5pct = false;  // statistic above the null threshold
};

/// Permutation test of independence built on distance correlation: the rows
/// of y are permuted n_permutations times and the statistic recomputed.
PermutationTestResult distance_correlation_permutation_test(
    const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int n_permutations,
    RngState& rng);

}  // namespace ssbayes
