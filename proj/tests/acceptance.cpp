// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "alloy/config.hpp"
#include "alloy/errors.hpp"
#include "alloy/estimators.hpp"
#include "alloy/spectra.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace alloy;

namespace {

struct Envelope {
  double min = std::numeric_limits<double>::infinity();
  double worst_ratio = 0;  // max sample * (Im z)^2, must stay <= 1
  std::size_t checked = 0;
  std::size_t violations = 0;

  void add(double value, double eta) {
    ++checked;
    min = std::min(min, value);
    worst_ratio = std::max(worst_ratio, value * eta * eta);
    if (!(value > 0) || value * eta * eta > 1.0) ++violations;
  }
};

Envelope envelope;
int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail, double seconds, double limit) {
  const bool in_time = seconds < limit;
  if (!pass || !in_time) ++failures;
  std::printf("%s %2d %s: %s [%.1f s, limit %.0f s]%s\n", pass && in_time ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str(), seconds, limit, in_time ? "" : " (over time)");
  std::fflush(stdout);
}

template <typename F>
void criterion(int id, const std::string& name, double limit, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(id, name, pass, detail, s, limit);
}

std::string num(double x, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << x;
  return s.str();
}

SingleSitePotential sign_changing(int d) {
  std::vector<PotentialTerm> t{{origin(d), 1.0}, {unit_vector(d, 0), -0.3}};
  if (d > 1) t.push_back({unit_vector(d, 1, -1), 0.2});
  else t.push_back({unit_vector(d, 0, -1), 0.2});
  return SingleSitePotential(t);
}

SingleSitePotential nearest_neighbour() {
  return SingleSitePotential({{origin(1), 1.0}, {unit_vector(1, 0), 0.2}, {unit_vector(1, 0, -1), 0.2}});
}

ExperimentConfig minami_config(const SingleSitePotential& u, unsigned workers) {
  ExperimentConfig cfg;
  cfg.d = 1;
  cfg.L = 3;
  cfg.u = u;
  cfg.density = DisorderDensity::bump(0.0, 1.0);
  cfg.lambda = 2.0;
  cfg.x = origin(1);
  cfg.y = unit_vector(1, 0);
  cfg.n_samples = 100000;
  cfg.seed = 20240611;
  cfg.workers = workers;
  return cfg;
}

const std::vector<std::complex<double>> kEnergies{{0.0, 0.05}, {0.5, 0.05}, {1.0, 0.05}, {1.5, 0.05}, {2.0, 0.05}};

void record_envelope(const MinamiReport& r) {
  for (const auto& p : r.points) {
    envelope.add(p.min_sample, p.z.imag());
    envelope.add(p.max_sample, p.z.imag());
  }
}

std::vector<double> means(const MinamiReport& r) {
  std::vector<double> m;
  for (const auto& p : r.points) m.push_back(p.estimate.mean);
  return m;
}

bool minami_pass(const MinamiReport& r, bool classical, std::string& detail) {
  bool ok = true;
  std::ostringstream s;
  s << "bound " << num(r.points.front().estimate.bound.value()) << ", means";
  for (const auto& p : r.points) {
    ok = ok && p.estimate.verdict == Verdict::within_bound;
    if (classical) ok = ok && p.classical_verdict == Verdict::within_bound;
    s << ' ' << num(p.estimate.mean, 4) << "+-" << num(p.estimate.std_error, 2);
  }
  if (classical) s << "; classical " << num(r.points.front().classical_bound.value());
  s << "; ||B||_1 " << num(r.constants.cu) << " <= C_u " << num(r.cu.upper_bound);
  detail = s.str();
  return ok;
}

// --- criterion 1 -----------------------------------------------------------

bool krein_identity(std::string& detail) {
  double worst = 0;
  int instances = 0;
  RandomStream pick(2718, 0);
  for (int i = 0; i < 200; ++i) {
    const int d = 1 + i % 2;
    const int L = 1 + (i / 2) % 4;
    const double lambda = (i / 8) % 2 ? 2.0 : 0.5;
    const double eta = (i / 16) % 2 ? 1.0 : 1e-2;
    const auto u = (i / 32) % 2 ? sign_changing(d) : SingleSitePotential::delta(d);
    ExperimentConfig cfg;
    cfg.d = d;
    cfg.L = L;
    cfg.u = u;
    cfg.density = DisorderDensity::bump(0.0, 1.0);
    cfg.lambda = lambda;
    cfg.seed = 31415;
    const auto h = sample_hamiltonian(cfg, static_cast<std::uint64_t>(i));
    const Box box = cfg.box();
    const Site x = box.site(static_cast<Eigen::Index>(pick.uniform() * static_cast<double>(box.size())));
    Site y = x;
    while (y == x) y = box.site(static_cast<Eigen::Index>(pick.uniform() * static_cast<double>(box.size())));
    const std::complex<double> z(-2.0 * d + pick.uniform() * (4.0 * d + lambda * 1.5), eta);
    const auto k = krein_decomposition(h, z, x, y);
    const auto g = green_block(h, z, x, y);
    const Eigen::Matrix2cd via_m =
        k.green(lambda, h.potential()(*box.index_of(x)), h.potential()(*box.index_of(y)));
    worst = std::max(worst, (via_m - g.entries).cwiseAbs().maxCoeff());
    envelope.add(g.det_imag(), eta);
    ++instances;
  }
  detail = std::to_string(instances) + " instances, max entrywise |difference| " + num(worst, 3) + " (tol 1e-9)";
  return instances == 200 && worst <= 1e-9;
}

// --- criterion 2 -----------------------------------------------------------

bool circulant_identities(std::string& detail) {
  bool ok = true;
  std::ostringstream s;

  // The five-site worked example with distinct u(-1), u(0), u(1).
  {
    const double um = 0.11, u0 = 1.0, up = 0.27;
    const SingleSitePotential u({{unit_vector(1, 0, -1), um}, {origin(1), u0}, {unit_vector(1, 0), up}});
    const auto t = build_circulant(u, Box::centered(1, 1));
    Eigen::MatrixXd expected(5, 5);
    expected << u0, um, 0, 0, up,
                up, u0, um, 0, 0,
                0, up, u0, um, 0,
                0, 0, up, u0, um,
                um, 0, 0, up, u0;
    const bool same = t.A == expected;
    ok = ok && same;
    s << "5x5 example " << (same ? "exact" : "MISMATCH");
  }

  const std::vector<std::pair<SingleSitePotential, int>> cases{
      {SingleSitePotential::delta(1), 3},  {nearest_neighbour(), 3},    {sign_changing(1), 5},
      {sign_changing(2), 2},               {sign_changing(2), 4},       {SingleSitePotential::delta(2), 3}};
  double zeta_err = 0, worst_ratio = 0;
  std::size_t exact_mismatch = 0;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& [u, L] = cases[c];
    const Box lambda = Box::centered(u.dim(), L);
    const auto t = build_circulant(u, lambda);
    for (Eigen::Index i = 0; i < t.envelope.size(); ++i) {
      const Site si = t.envelope.site(i);
      if (!lambda.contains(si)) continue;
      for (Eigen::Index j = 0; j < t.envelope.size(); ++j)
        exact_mismatch += t.A(i, j) != u(si - t.envelope.site(j));
    }
    RandomStream rng(99, c);
    const auto omega = sample_couplings(DisorderDensity::bump(0.0, 1.0), t.envelope, rng);
    const Eigen::VectorXd zeta = transform_couplings(t, omega);
    const auto h = build_hamiltonian(lambda, u, omega, 1.0);
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
      zeta_err = std::max(zeta_err, std::abs(zeta(*t.envelope.index_of(lambda.site(i))) - h.potential()(i)));
    worst_ratio = std::max(worst_ratio, t.b_one_norm / infinite_cu(u).upper_bound);
  }
  ok = ok && exact_mismatch == 0 && zeta_err <= 1e-12 && worst_ratio <= 1 + 1e-6;
  s << "; interior A(i,j) = u(i-j) mismatches " << exact_mismatch << "; max |zeta - V| " << num(zeta_err, 3)
    << " (tol 1e-12); max ||B||_1 / C_u " << num(worst_ratio, 8) << " (tol 1 + 1e-6)";
  detail = s.str();
  return ok;
}

// --- criterion 7 -----------------------------------------------------------

struct PoissonRun {
  PointProcessStats stats;
  PointProcessStats fence;
  Eigen::VectorXd ids_values;
  double E0 = 0;
};

PoissonRun poisson_pipeline(unsigned workers) {
  ExperimentConfig cfg;
  cfg.d = 1;
  cfg.L = 500;
  cfg.u = SingleSitePotential::delta(1);
  cfg.density = DisorderDensity::bump(0.0, 1.0);
  cfg.lambda = 10.0;
  cfg.n_samples = 300;
  cfg.seed = 4101;
  cfg.workers = workers;

  ExperimentConfig ic = cfg;
  ic.seed = ids_seed(cfg.seed);
  const auto [lo, hi] = spectral_envelope(ic);
  const auto ids = empirical_ids(ic, 2000, 100, uniform_grid(lo, hi, 1e-3));

  PoissonRun run;
  run.E0 = ids.quantile(0.5);
  const auto samples = rescaled_realizations(cfg, ids, run.E0);
  run.stats = poisson_tests(samples);
  run.fence = poisson_tests(picket_fence(300, {-6.0, 15.0}));
  run.ids_values = ids.values;
  return run;
}

PoissonRun first_poisson;

bool poisson_statistics(std::string& detail) {
  first_poisson = poisson_pipeline(1);
  const auto& st = first_poisson.stats;
  const auto& fence = first_poisson.fence;
  std::ostringstream s;
  s << "E0 " << num(first_poisson.E0) << "; KS " << num(st.ks.statistic, 4) << " < " << num(st.ks.critical_value, 4)
    << " on " << st.gaps.size() << " gaps; chi-square p " << num(st.chi_square.p_value, 3) << " (dof "
    << st.chi_square.dof << "); |r| " << num(std::abs(st.correlation), 3) << " < " << num(st.correlation_threshold, 3)
    << "; window intensity " << num(st.window_intensity, 4) << " +- " << num(st.window_intensity_std_error, 2)
    << ", [0,1) mean " << num(st.unit_mean, 3) << " +- " << num(st.unit_std_error, 2) << "; picket fence KS "
    << num(fence.ks.statistic, 3) << (fence.ks.pass ? " (passes, BAD)" : " fails");
  detail = s.str();
  return st.pass() && st.intensity_pass && !fence.ks.pass && fence.ks.statistic > 0.5 && !fence.pass();
}

// --- criterion 8 -----------------------------------------------------------

bool sobolev(std::string& detail) {
  const auto hat = hat_function(0.0, 0.5, 1.0);
  const double exact = sobolev_ratio({{hat, hat}}).ratio;
  RandomStream rng(8, 0);
  const auto factor = [&]() {
    const double a = -2.0 + 4.0 * rng.uniform();
    const double w = 0.1 + 3.0 * rng.uniform();
    const double h = 0.2 + 5.0 * rng.uniform();
    if (rng.uniform() < 0.5) return hat_function(a, a + w * (0.05 + 0.9 * rng.uniform()), a + w, h);
    return bump_profile(a, a + w).scaled(h);
  };
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const auto g = factor();
    const auto f = factor();
    worst = std::max(worst, sobolev_ratio({{g, f}}).ratio);
  }
  detail = "max ratio over 100 tensor products " + num(worst, 10) + " (<= 0.25 + 1e-12); hat x hat " + num(exact, 17);
  return worst <= 0.25 + 1e-12 && exact == 0.25;
}

}  // namespace

int main() {
  std::printf("alloy-lab acceptance suite\n");

  criterion(1, "Krein identity", 60, krein_identity);
  criterion(2, "circulant identities", 60, circulant_identities);

  std::vector<double> delta_means, nn_means;
  criterion(3, "Minami bound, u = delta_0", 600, [&](std::string& detail) {
    const auto r = estimate_minami(minami_config(SingleSitePotential::delta(1), 1), kEnergies);
    record_envelope(r);
    delta_means = means(r);
    return minami_pass(r, true, detail);
  });
  criterion(4, "Minami bound, u(0)=1, u(+-1)=0.2", 600, [&](std::string& detail) {
    const auto r = estimate_minami(minami_config(nearest_neighbour(), 1), kEnergies);
    record_envelope(r);
    nn_means = means(r);
    return minami_pass(r, false, detail);
  });

  criterion(5, "two-eigenvalue chain", 600, [&](std::string& detail) {
    const auto cfg = minami_config(SingleSitePotential::delta(1), 1);
    const std::vector<double> widths{1e-3, 1e-2};
    const auto rs = two_eigenvalue_sweep(cfg, 1.0, widths);
    bool ok = true;
    std::ostringstream s;
    for (const auto& r : rs) {
      ok = ok && r.markov_exact && r.bound_verdict == Verdict::within_bound;
      s << "|I| " << num(r.I.length(), 2) << ": P " << num(r.probability.mean, 3) << " <= E/2 "
        << num(r.factorial_moment.mean, 3) << " (" << r.samples_with_two << " <= " << num(r.half_pair_sum) << ")"
        << " <= bound " << num(r.bound.value(), 4) << "; ";
    }
    detail = s.str();
    return ok;
  });

  criterion(6, "Wegner linearity", 300, [&](std::string& detail) {
    auto cfg = minami_config(SingleSitePotential::delta(1), 1);
    cfg.L = 5;
    cfg.n_samples = 10000;
    const std::vector<double> widths{0.05, 0.1, 0.2};
    const auto sweep = wegner_sweep(cfg, 1.0, widths);
    std::ostringstream s;
    s << "ratios";
    for (const auto& p : sweep.points) s << ' ' << num(p.ratio, 4) << "+-" << num(p.ratio_std_error, 2);
    s << "; spread " << num(sweep.spread, 4) << " (<= 1.2)";
    detail = s.str();
    return sweep.stable;
  });

  criterion(7, "Poisson statistics", 1800, poisson_statistics);
  criterion(8, "Sobolev ratio", 10, sobolev);

  criterion(9, "positivity and envelope", 1, [&](std::string& detail) {
    detail = std::to_string(envelope.checked) + " recorded extremes, min det Im g " + num(envelope.min, 3) +
             ", max det Im g (Im z)^2 " + num(envelope.worst_ratio, 4) + ", violations " +
             std::to_string(envelope.violations);
    return envelope.checked > 0 && envelope.violations == 0;
  });

  criterion(10, "determinism across worker counts", 1800, [&](std::string& detail) {
    const auto d3 = means(estimate_minami(minami_config(SingleSitePotential::delta(1), 3), kEnergies));
    const auto n3 = means(estimate_minami(minami_config(nearest_neighbour(), 4), kEnergies));
    const auto p2 = poisson_pipeline(2);
    const auto& a = first_poisson.stats;
    const auto& b = p2.stats;
    const bool minami_same = d3 == delta_means && n3 == nn_means && !d3.empty() && !n3.empty();
    const bool poisson_same = p2.ids_values == first_poisson.ids_values && p2.E0 == first_poisson.E0 &&
                              a.gaps == b.gaps && a.counts == b.counts && a.ks.statistic == b.ks.statistic &&
                              a.chi_square.statistic == b.chi_square.statistic && a.correlation == b.correlation &&
                              a.unit_mean == b.unit_mean && a.window_intensity == b.window_intensity;
    detail = std::string("criterion 3 (1 vs 3 workers) ") + (d3 == delta_means ? "identical" : "DIFFERENT") +
             ", criterion 4 (1 vs 4 workers) " + (n3 == nn_means ? "identical" : "DIFFERENT") +
             ", criterion 7 (1 vs 2 workers) " + (poisson_same ? "identical" : "DIFFERENT");
    return minami_same && poisson_same;
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILED", failures);
  return failures == 0 ? 0 : 1;
}
