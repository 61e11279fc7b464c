#include "alloy/errors.hpp"
#include "alloy/estimators.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace alloy;

namespace {

ExperimentConfig base_config(int d, int L, double lambda, std::size_t n, unsigned workers = 1) {
  ExperimentConfig cfg;
  cfg.d = d;
  cfg.L = L;
  cfg.u = SingleSitePotential::delta(d);
  cfg.density = DisorderDensity::bump(0.0, 1.0);
  cfg.lambda = lambda;
  cfg.z = {1.0, 0.05};
  cfg.J = Interval::centered(1.0, 0.1);
  cfg.x = origin(d);
  cfg.y = unit_vector(d, 0);
  cfg.n_samples = n;
  cfg.seed = 12345;
  cfg.workers = workers;
  return cfg;
}

}  // namespace

TEST_CASE("run_parallel does not depend on the worker count") {
  const ExperimentConfig cfg = base_config(1, 3, 2.0, 0);
  const SampleKernel kernel = [&](std::size_t i, std::span<double> row) {
    const auto h = sample_hamiltonian(cfg, i);
    row[0] = h.potential().sum();
    row[1] = eigenvalues(h)(0);
  };
  const auto a = run_parallel(257, 2, 1, kernel);
  const auto b = run_parallel(257, 2, 4, kernel);
  CHECK(a.values == b.values);
  CHECK(a.failures == 0);
  CHECK(a.rows() == 257);
}

TEST_CASE("run_parallel failure handling") {
  CHECK_THROWS_WITH(run_parallel(0, 1, 1, [](std::size_t, std::span<double>) {}), "empty sample");

  const auto one_failure = run_parallel(5000, 1, 2, [](std::size_t i, std::span<double> row) {
    if (i == 17) throw SolverFailure("singular");
    row[0] = 1.0;
  });
  CHECK(one_failure.failures == 1);
  CHECK(one_failure.column(0).size() == 4999);
  CHECK(one_failure.first_failure.find("singular") != std::string::npos);

  CHECK_THROWS_AS(run_parallel(1000, 1, 2,
                               [](std::size_t i, std::span<double>) {
                                 if (i < 2) throw SolverFailure("singular");
                               }),
                  std::runtime_error);

  CHECK_THROWS_WITH_AS(run_parallel(100, 1, 3,
                                    [](std::size_t i, std::span<double>) {
                                      if (i == 70) throw std::domain_error("boom 70");
                                      if (i == 30) throw std::domain_error("boom 30");
                                    }),
                       "boom 30", std::domain_error);
}

TEST_CASE("three sigma verdicts") {
  CHECK(three_sigma_verdict(1.0, 0.1, 1.2, 100) == Verdict::within_bound);
  CHECK(three_sigma_verdict(1.29, 0.1, 1.0, 100) == Verdict::within_bound);
  CHECK(three_sigma_verdict(1.31, 0.1, 1.0, 100) == Verdict::violated_beyond_3sigma);
  CHECK(three_sigma_verdict(1.0, 0.1, std::nullopt, 100) == Verdict::inconclusive);
  CHECK(three_sigma_verdict(1.0, 0.0, 2.0, 1) == Verdict::inconclusive);
  CHECK(to_string(Verdict::within_bound) == "within_bound");
}

TEST_CASE("Minami estimator") {
  auto cfg = base_config(1, 3, 2.0, 4000);
  const auto r = estimate_minami(cfg);
  REQUIRE(r.points.size() == 1);
  const auto& p = r.points.front();
  CHECK(p.estimate.bound.value() == doctest::Approx(std::numbers::pi * std::numbers::pi / 4 * 10 / std::sqrt(3.0)));
  CHECK(p.estimate.verdict == Verdict::within_bound);
  CHECK(p.min_sample > 0);
  CHECK(p.max_sample <= 1 / (0.05 * 0.05));
  CHECK(p.classical_bound.value() == doctest::Approx(std::numbers::pi * std::numbers::pi * 1.875 * 1.875));
  CHECK(p.classical_bound_scaled.value() == doctest::Approx(*p.classical_bound / 4));
  CHECK(r.all_within());

  SUBCASE("standard error shrinks like n^-1/2") {
    auto doubled = cfg;
    doubled.n_samples = 16000;
    const auto r4 = estimate_minami(doubled);
    CHECK(r4.points.front().estimate.std_error / p.estimate.std_error == doctest::Approx(0.5).epsilon(0.15));
  }
  SUBCASE("bound scales like lambda^-2") {
    auto strong = cfg;
    strong.lambda = 20.0;
    strong.n_samples = 100;
    const auto r10 = estimate_minami(strong);
    CHECK(*r10.points.front().estimate.bound == doctest::Approx(*p.estimate.bound / 100));
  }
  SUBCASE("worker count does not change the estimate") {
    auto threaded = cfg;
    threaded.workers = 3;
    const auto r3 = estimate_minami(threaded);
    CHECK(r3.points.front().estimate.mean == p.estimate.mean);
    CHECK(r3.points.front().estimate.std_error == p.estimate.std_error);
  }
  SUBCASE("preconditions") {
    auto free = cfg;
    free.lambda = 0.0;
    CHECK_THROWS_AS(estimate_minami(free), std::invalid_argument);
    auto same = cfg;
    same.y = same.x;
    CHECK_THROWS_AS(estimate_minami(same), std::invalid_argument);
    auto zero_mean = cfg;
    zero_mean.u = SingleSitePotential({{origin(1), 1.0}, {unit_vector(1, 0), -1.0}});
    CHECK_THROWS_AS(estimate_minami(zero_mean), AssumptionViolated);
  }
}

TEST_CASE("Wegner counts") {
  SUBCASE("the full spectral range counts every eigenvalue") {
    auto cfg = base_config(1, 2, 2.0, 1000);
    cfg.J = {-10.0, 10.0};
    const auto p = estimate_wegner(cfg);
    CHECK(p.estimate.mean == 5.0);
    CHECK(p.estimate.std_error == 0.0);
  }
  SUBCASE("lambda = 0 is deterministic") {
    auto cfg = base_config(1, 1, 0.0, 1000);
    cfg.J = {-1.5, -1.3};  // contains -sqrt(2) only
    const auto p = estimate_wegner(cfg);
    CHECK(p.estimate.mean == 1.0);
    CHECK(p.estimate.std_error == 0.0);
  }
  SUBCASE("sweep shares samples and reports the spread") {
    const auto cfg = base_config(1, 5, 2.0, 4000);
    const std::vector<double> widths{0.05, 0.1, 0.2};
    const auto s = wegner_sweep(cfg, 1.0, widths);
    REQUIRE(s.points.size() == 3);
    CHECK(s.points[0].estimate.mean <= s.points[1].estimate.mean);
    CHECK(s.points[1].estimate.mean <= s.points[2].estimate.mean);
    CHECK(s.spread >= 1.0);
    CHECK(s.stable == (s.spread <= 1.2));
  }
  CHECK_THROWS_AS(estimate_wegner(base_config(1, 2, 2.0, 999)), std::invalid_argument);
}

TEST_CASE("two-eigenvalue probability") {
  SUBCASE("degenerate free eigenvalue") {
    // The 3 x 3 free grid has -sqrt(2) with multiplicity two.
    auto cfg = base_config(2, 1, 0.0, 1000);
    cfg.J = Interval::centered(-std::sqrt(2.0), 0.01);
    const auto r = estimate_two_eigenvalue_probability(cfg);
    CHECK(r.probability.mean == 1.0);
    CHECK(r.factorial_moment.mean == 1.0);
    CHECK(r.markov_exact);
    CHECK_FALSE(r.bound.has_value());
  }
  SUBCASE("a tiny interval away from the free spectrum") {
    auto cfg = base_config(2, 1, 0.0, 1000);
    cfg.J = Interval::centered(1.0, 1e-6);
    const auto r = estimate_two_eigenvalue_probability(cfg);
    CHECK(r.probability.mean == 0.0);
    CHECK(r.factorial_moment.mean == 0.0);
  }
  SUBCASE("disordered chain") {
    const auto cfg = base_config(1, 3, 2.0, 5000, 2);
    const std::vector<double> widths{0.01, 0.5};
    const auto rs = two_eigenvalue_sweep(cfg, 1.0, widths);
    REQUIRE(rs.size() == 2);
    for (const auto& r : rs) {
      CHECK(r.passed());
      CHECK(r.bound.value() == doctest::Approx(0.5 * std::numbers::pi * std::numbers::pi / 4 * 10 / std::sqrt(3.0) *
                                               r.I.length() * r.I.length() * 49));
      CHECK(static_cast<double>(r.samples_with_two) <= r.half_pair_sum);
    }
    CHECK(rs[0].probability.mean <= rs[1].probability.mean);
  }
}

TEST_CASE("finite-volume criterion probe") {
  auto cfg = base_config(1, 8, 50.0, 200);
  const std::vector<int> radii{4, 8};
  CHECK_THROWS_AS(probe_fvc(cfg, 2.5, 2.0, radii), std::invalid_argument);
  const auto pts = probe_fvc(cfg, 2.5, 3.0, radii);
  REQUIRE(pts.size() == 2);
  CHECK(pts[1].L == 8);
  CHECK(pts[1].threshold == doctest::Approx(std::pow(8.0, -3.0)));
  CHECK(pts[1].probability >= 0.99);
  CHECK(pts[1].n_samples == 200);
}

TEST_CASE("fractional moments decay exponentially") {
  auto weak = base_config(1, 12, 5.0, 2000);
  auto strong = base_config(1, 12, 50.0, 2000);
  auto pairs = axis_pairs(1, 12);
  CHECK(pairs.size() == 12);
  pairs.resize(8);
  const auto rw = probe_fractional_moment(weak, 2.5, 1e-3, 0.5, pairs);
  const auto rs = probe_fractional_moment(strong, 25.0, 1e-3, 0.5, pairs);
  CHECK(rw.gamma > 0);
  CHECK(rs.gamma > rw.gamma);
  CHECK(rw.r_squared > 0.9);
  CHECK(rs.r_squared > 0.9);
  const std::vector<std::pair<Site, Site>> same{{origin(1), origin(1)}, {origin(1), unit_vector(1, 0)}};
  CHECK_THROWS_AS(probe_fractional_moment(weak, 2.5, 1e-3, 0.5, same), std::invalid_argument);
  CHECK_THROWS_AS(probe_fractional_moment(weak, 2.5, 1e-3, 1.0, pairs), std::invalid_argument);
}

TEST_CASE("independence at a distance") {
  auto cfg = base_config(1, 3, 2.0, 2000, 2);
  cfg.J = {0.0, 2.0};
  const auto r = probe_iad(cfg, 2);
  CHECK(r.threshold == doctest::Approx(3 / std::sqrt(2000.0)));
  CHECK(r.uncorrelated);
  CHECK(r.mean_left == doctest::Approx(r.mean_right).epsilon(0.1));
}
