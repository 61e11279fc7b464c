#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace alloy {

/// Fixed-tree pairwise summation: the association order depends only on the
/// length of the input, so the result is reproducible bit for bit.
template <typename Scalar>
Scalar pairwise_sum(std::span<const Scalar> x) {
  if (x.size() <= 8) {
    Scalar s = 0;
    for (Scalar v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

struct SampleMoments {
  double mean = 0;
  double std_dev = 0;  // n - 1 normalisation
  double std_error = 0;
  std::size_t n = 0;
};

/// Two-pass mean and standard error with pairwise summation.
SampleMoments sample_moments(std::span<const double> x);

struct KsResult {
  double statistic = 0;
  double critical_value = 0;  // asymptotic 5% level, 1.358 / sqrt(n)
  std::size_t n = 0;
  bool pass = false;
};

/// One-sample Kolmogorov-Smirnov test of `sample` against Exp(1).
KsResult ks_test_exponential(std::vector<double> sample);

struct ChiSquareResult {
  double statistic = 0;
  int dof = 0;
  double p_value = 0;
  double critical_value = 0;  // 5% level
  bool pass = false;
  std::vector<int> bin_lower;  // each bin covers counts [bin_lower[i], bin_lower[i+1])
  std::vector<double> observed;
  std::vector<double> expected;
};

/// Chi-square goodness of fit of integer counts against Poisson(mean). Bins are
/// merged left to right until each expected count is at least `min_expected`.
ChiSquareResult chi_square_poisson(std::span<const int> counts, double mean, double min_expected = 5.0);

double chi_square_survival(double statistic, int dof);
double chi_square_quantile(double probability, int dof);

double pearson_correlation(std::span<const double> a, std::span<const double> b);

struct LinearFit {
  double intercept = 0;
  double slope = 0;
  double r_squared = 0;
};

LinearFit least_squares_line(std::span<const double> x, std::span<const double> y);

}  // namespace alloy
