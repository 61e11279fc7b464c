#include "alloy/random.hpp"
#include "alloy/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace alloy;

namespace {

std::vector<double> exponential_sample(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  RandomStream rng(seed, stream);
  std::vector<double> x(n);
  for (auto& v : x) v = -std::log1p(-rng.uniform());
  return x;
}

}  // namespace

TEST_CASE("random streams are keyed by (seed, stream)") {
  RandomStream a(1, 7), b(1, 7), c(1, 8), d(2, 7);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 16; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    differs_c |= x != c.uniform();
    differs_d |= x != d.uniform();
  }
  CHECK(differs_c);
  CHECK(differs_d);
  CHECK(retry_stream_id(42, 0) == 42);
  CHECK(retry_stream_id(42, 1) != 42);
  CHECK(retry_stream_id(42, 1) != retry_stream_id(43, 1));
}

TEST_CASE("uniform draws have the right first two moments") {
  RandomStream rng(99, 0);
  std::vector<double> x(200000);
  for (auto& v : x) v = rng.uniform();
  const auto m = sample_moments(x);
  CHECK(m.mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(m.std_dev * m.std_dev == doctest::Approx(1.0 / 12).epsilon(0.01));
}

TEST_CASE("pairwise summation") {
  std::vector<double> x(1000);
  std::iota(x.begin(), x.end(), 1.0);
  CHECK(pairwise_sum(std::span<const double>(x)) == 500500.0);
  CHECK(pairwise_sum(std::span<const double>()) == 0.0);
}

TEST_CASE("sample moments") {
  const std::vector<double> x{2, 4, 4, 4, 5, 5, 7, 9};
  const auto m = sample_moments(x);
  CHECK(m.mean == doctest::Approx(5.0));
  CHECK(m.std_dev == doctest::Approx(std::sqrt(32.0 / 7)));
  CHECK(m.std_error == doctest::Approx(std::sqrt(32.0 / 7) / std::sqrt(8.0)));
  CHECK_THROWS(sample_moments(std::vector<double>{}));
}

TEST_CASE("KS statistic of equal gaps has the closed form 1 - 1/e") {
  const auto r = ks_test_exponential(std::vector<double>(500, 1.0));
  CHECK(r.statistic == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(r.critical_value == doctest::Approx(1.358 / std::sqrt(500.0)));
  CHECK_FALSE(r.pass);
}

TEST_CASE("KS self-consistency on true Exp(1) gaps") {
  int passes = 0;
  for (std::uint64_t rep = 0; rep < 20; ++rep) passes += ks_test_exponential(exponential_sample(10000, 5, rep)).pass;
  CHECK(passes >= 18);
}

TEST_CASE("chi-square distribution functions") {
  // dof 2: survival exp(-x / 2)
  for (double x : {0.5, 2.0, 7.0}) CHECK(chi_square_survival(x, 2) == doctest::Approx(std::exp(-x / 2)));
  CHECK(chi_square_quantile(0.95, 1) == doctest::Approx(3.841458820694124).epsilon(1e-9));
  CHECK(chi_square_quantile(0.95, 10) == doctest::Approx(18.307038053275146).epsilon(1e-9));
}

TEST_CASE("chi-square against Poisson") {
  // Exact expected frequencies pass; a constant count fails.
  RandomStream rng(11, 0);
  std::vector<int> counts;
  for (int i = 0; i < 2000; ++i) {
    int k = 0;
    for (double t = -std::log1p(-rng.uniform()); t < 3.0; t -= std::log1p(-rng.uniform())) ++k;
    counts.push_back(k);
  }
  const auto good = chi_square_poisson(counts, 3.0);
  CHECK(good.pass);
  CHECK(good.dof >= 5);
  double total = 0;
  for (double e : good.expected) {
    CHECK(e >= 5.0);
    total += e;
  }
  CHECK(total == doctest::Approx(2000.0));
  const auto bad = chi_square_poisson(std::vector<int>(2000, 3), 3.0);
  CHECK_FALSE(bad.pass);
}

TEST_CASE("correlation and least squares") {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 4, 6, 8, 10}, c{5, 4, 3, 2, 1};
  CHECK(pearson_correlation(a, b) == doctest::Approx(1.0));
  CHECK(pearson_correlation(a, c) == doctest::Approx(-1.0));
  CHECK(pearson_correlation(a, std::vector<double>(5, 1.0)) == 0.0);
  const std::vector<double> y{1.5, 3.5, 5.5, 7.5, 9.5};
  const auto fit = least_squares_line(a, y);
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(-0.5));
  CHECK(fit.r_squared == doctest::Approx(1.0));
}
