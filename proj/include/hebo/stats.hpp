#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hebo {

/// k >= 2 groups of observations, each of size >= 2.
struct GroupedSamples {
  std::vector<Eigen::VectorXd> groups;

  void validate() const;
};

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::vector<double> dof;  // one entry (chi2, t) or two (F numerator, denominator)
};

/// Levene's homogeneity-of-variance test with group-mean centering:
///   W = (N-k)/(k-1) * sum_i n_i (Zbar_i - Zbar)^2 / sum_ij (Z_ij - Zbar_i)^2,
/// Z_ij = |Y_ij - mean_i|, referenced against F(k-1, N-k).
TestResult levene_test(const GroupedSamples& g);

/// Fligner-Killeen rank-based test: normal scores
/// a_r = Phi^-1((1 + r/(N+1))/2) on the pooled ranks of |Y_ij - median_i|
/// (average ranks on ties), chi2 = sum_i n_i (Abar_i - abar)^2 / V^2
/// referenced against chi-square(k-1).
TestResult fligner_killeen_test(const GroupedSamples& g);

enum class Alternative { kTwoSided, kGreater, kLess };

/// Paired t-test on d = x - y with n-1 degrees of freedom.
TestResult paired_t_test(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                         Alternative alternative);

}  // namespace hebo
