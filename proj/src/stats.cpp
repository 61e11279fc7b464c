#include "alloy/stats.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/SpecialFunctions>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace alloy {

SampleMoments sample_moments(std::span<const double> x) {
  SampleMoments m;
  m.n = x.size();
  if (m.n == 0) throw std::invalid_argument("sample_moments: empty sample");
  m.mean = pairwise_sum(x) / static_cast<double>(m.n);
  if (m.n > 1) {
    std::vector<double> sq(x.size());
    std::transform(x.begin(), x.end(), sq.begin(), [&](double v) { return (v - m.mean) * (v - m.mean); });
    m.std_dev = std::sqrt(pairwise_sum(std::span<const double>(sq)) / static_cast<double>(m.n - 1));
    m.std_error = m.std_dev / std::sqrt(static_cast<double>(m.n));
  }
  return m;
}

KsResult ks_test_exponential(std::vector<double> sample) {
  KsResult r;
  r.n = sample.size();
  if (r.n == 0) return r;
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(r.n);
  for (std::size_t i = 0; i < r.n; ++i) {
    const double cdf = sample[i] <= 0 ? 0.0 : -std::expm1(-sample[i]);
    r.statistic = std::max({r.statistic, (static_cast<double>(i) + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  r.critical_value = 1.358 / std::sqrt(n);
  r.pass = r.statistic < r.critical_value;
  return r;
}

double chi_square_survival(double statistic, int dof) {
  if (dof <= 0) throw std::invalid_argument("chi_square_survival: dof must be positive");
  if (statistic <= 0) return 1.0;
  return Eigen::numext::igammac(0.5 * dof, 0.5 * statistic);
}

double chi_square_quantile(double probability, int dof) {
  double lo = 0, hi = std::max(10.0, 4.0 * dof);
  while (1.0 - chi_square_survival(hi, dof) < probability) hi *= 2;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (1.0 - chi_square_survival(mid, dof) < probability ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ChiSquareResult chi_square_poisson(std::span<const int> counts, double mean, double min_expected) {
  if (counts.empty()) throw std::invalid_argument("chi_square_poisson: no counts");
  if (!(mean > 0)) throw std::invalid_argument("chi_square_poisson: mean must be positive");
  ChiSquareResult r;
  const double n = static_cast<double>(counts.size());
  double cdf = 0, acc = 0;
  int start = 0;
  for (int k = 0;; ++k) {
    const double pmf = std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
    cdf += pmf;
    acc += n * pmf;
    const double tail = n * std::max(0.0, 1.0 - cdf);
    if (tail < min_expected) {
      r.bin_lower.push_back(start);
      r.expected.push_back(acc + tail);
      break;
    }
    if (acc >= min_expected) {
      r.bin_lower.push_back(start);
      r.expected.push_back(acc);
      start = k + 1;
      acc = 0;
    }
  }
  r.observed.assign(r.bin_lower.size(), 0.0);
  for (int c : counts) {
    auto it = std::upper_bound(r.bin_lower.begin(), r.bin_lower.end(), c);
    r.observed[static_cast<std::size_t>(std::distance(r.bin_lower.begin(), it)) - 1] += 1.0;
  }
  for (std::size_t b = 0; b < r.observed.size(); ++b)
    r.statistic += (r.observed[b] - r.expected[b]) * (r.observed[b] - r.expected[b]) / r.expected[b];
  r.dof = static_cast<int>(r.observed.size()) - 1;
  if (r.dof < 1) return r;
  r.p_value = chi_square_survival(r.statistic, r.dof);
  r.critical_value = chi_square_quantile(0.95, r.dof);
  r.pass = r.p_value >= 0.05;
  return r;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("pearson_correlation: size mismatch");
  const auto ma = sample_moments(a), mb = sample_moments(b);
  if (ma.std_dev == 0 || mb.std_dev == 0) return 0.0;
  std::vector<double> prod(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) prod[i] = (a[i] - ma.mean) * (b[i] - mb.mean);
  const double cov = pairwise_sum(std::span<const double>(prod)) / static_cast<double>(a.size() - 1);
  return cov / (ma.std_dev * mb.std_dev);
}

LinearFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares_line: need >= 2 points");
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = x[i];
    rhs(i) = y[i];
  }
  const Eigen::Vector2d beta = design.colPivHouseholderQr().solve(rhs);
  LinearFit fit{beta(0), beta(1), 1.0};
  const double mean = rhs.mean();
  const double ss_tot = (rhs.array() - mean).square().sum();
  const double ss_res = (rhs - design * beta).squaredNorm();
  if (ss_tot > 0) fit.r_squared = 1.0 - ss_res / ss_tot;
  return fit;
}

}  // namespace alloy
