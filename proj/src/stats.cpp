#include "hebo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hebo/errors.hpp"
#include "hebo/special_functions.hpp"

namespace hebo {

namespace {

double median_of(Eigen::VectorXd v) {
  std::sort(v.data(), v.data() + v.size());
  const auto n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Average ranks (1-based) with midranks on ties.
std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mid;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

void GroupedSamples::validate() const {
  if (groups.size() < 2) throw ValidationError("grouped samples: need at least 2 groups");
  for (const auto& g : groups)
    if (g.size() < 2) throw ValidationError("grouped samples: every group needs >= 2 values");
}

TestResult levene_test(const GroupedSamples& g) {
  g.validate();
  const int k = static_cast<int>(g.groups.size());
  double N = 0.0;
  std::vector<Eigen::VectorXd> Z;
  Z.reserve(g.groups.size());
  for (const auto& grp : g.groups) {
    N += static_cast<double>(grp.size());
    Z.push_back((grp.array() - grp.mean()).abs().matrix());
  }
  double zbar_all = 0.0;
  for (const auto& z : Z) zbar_all += z.sum();
  zbar_all /= N;

  double between = 0.0, within = 0.0;
  for (const auto& z : Z) {
    const double zbar_i = z.mean();
    between += static_cast<double>(z.size()) * (zbar_i - zbar_all) * (zbar_i - zbar_all);
    within += (z.array() - zbar_i).square().sum();
  }
  if (!(within > 0.0))
    throw FitError("levene_test: all groups internally constant (degenerate)");

  TestResult res;
  const double d1 = static_cast<double>(k - 1);
  const double d2 = N - static_cast<double>(k);
  res.statistic = (d2 / d1) * between / within;
  res.p_value = 1.0 - sf::f_cdf(res.statistic, d1, d2);
  res.dof = {d1, d2};
  return res;
}

TestResult fligner_killeen_test(const GroupedSamples& g) {
  g.validate();
  const int k = static_cast<int>(g.groups.size());
  std::vector<double> pooled;
  std::vector<int> group_of;
  for (int i = 0; i < k; ++i) {
    const auto& grp = g.groups[static_cast<std::size_t>(i)];
    const double med = median_of(grp);
    for (Eigen::Index j = 0; j < grp.size(); ++j) {
      pooled.push_back(std::abs(grp[j] - med));
      group_of.push_back(i);
    }
  }
  const double N = static_cast<double>(pooled.size());
  const auto ranks = average_ranks(pooled);

  std::vector<double> scores(pooled.size());
  for (std::size_t i = 0; i < pooled.size(); ++i)
    scores[i] = sf::normal_quantile(0.5 * (1.0 + ranks[i] / (N + 1.0)));

  const double abar = std::accumulate(scores.begin(), scores.end(), 0.0) / N;
  double v2 = 0.0;
  for (double a : scores) v2 += (a - abar) * (a - abar);
  v2 /= (N - 1.0);
  if (!(v2 > 0.0)) throw FitError("fligner_killeen_test: degenerate scores");

  std::vector<double> group_sum(static_cast<std::size_t>(k), 0.0);
  std::vector<double> group_n(static_cast<std::size_t>(k), 0.0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    group_sum[static_cast<std::size_t>(group_of[i])] += scores[i];
    group_n[static_cast<std::size_t>(group_of[i])] += 1.0;
  }
  double stat = 0.0;
  for (int i = 0; i < k; ++i) {
    const double abar_i = group_sum[static_cast<std::size_t>(i)] / group_n[static_cast<std::size_t>(i)];
    stat += group_n[static_cast<std::size_t>(i)] * (abar_i - abar) * (abar_i - abar);
  }
  stat /= v2;

  TestResult res;
  res.statistic = stat;
  res.p_value = 1.0 - sf::chisq_cdf(stat, static_cast<double>(k - 1));
  res.dof = {static_cast<double>(k - 1)};
  return res;
}

TestResult paired_t_test(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                         Alternative alternative) {
  if (x.size() != y.size()) throw ValidationError("paired_t_test: length mismatch");
  const auto n = x.size();
  if (n < 2) throw ValidationError("paired_t_test: need at least 2 pairs");
  const Eigen::VectorXd d = x - y;
  const double mean = d.mean();
  const double sd = std::sqrt((d.array() - mean).square().sum() / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw FitError("paired_t_test: zero variance of differences");

  TestResult res;
  const double dof = static_cast<double>(n - 1);
  res.statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
  const double cdf = sf::student_t_cdf(res.statistic, dof);
  switch (alternative) {
    case Alternative::kTwoSided: res.p_value = 2.0 * std::min(cdf, 1.0 - cdf); break;
    case Alternative::kGreater: res.p_value = 1.0 - cdf; break;
    case Alternative::kLess: res.p_value = cdf; break;
  }
  res.dof = {dof};
  return res;
}

}  // namespace hebo
