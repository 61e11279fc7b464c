#include "alloy/spectra.hpp"

#include "alloy/random.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace alloy {

double EmpiricalIds::operator()(double energy) const {
  if (!covers(energy)) {
    std::ostringstream msg;
    msg << "IDS: energy " << energy << " outside the grid [" << grid(0) << ", " << grid(grid.size() - 1) << "]";
    throw std::out_of_range(msg.str());
  }
  const double* first = grid.data();
  const double* last = first + grid.size();
  const auto k = std::upper_bound(first, last, energy) - first;
  if (k >= grid.size()) return values(grid.size() - 1);
  const double t = (energy - grid(k - 1)) / (grid(k) - grid(k - 1));
  return values(k - 1) + t * (values(k) - values(k - 1));
}

double EmpiricalIds::quantile(double p) const {
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("IDS quantile: p must lie in [0, 1]");
  const double* first = values.data();
  const auto k = std::lower_bound(first, first + values.size(), p) - first;
  if (k >= values.size()) return grid(grid.size() - 1);
  if (k == 0 || values(k) == values(k - 1)) return grid(k);
  const double t = (p - values(k - 1)) / (values(k) - values(k - 1));
  return grid(k - 1) + t * (grid(k) - grid(k - 1));
}

Eigen::VectorXd uniform_grid(double lower, double upper, double step) {
  if (!(step > 0) || !(upper > lower)) throw std::invalid_argument("uniform_grid: need lower < upper and step > 0");
  const auto n = static_cast<Eigen::Index>(std::ceil((upper - lower) / step - 1e-9)) + 1;
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) g(i) = lower + static_cast<double>(i) * step;
  g(n - 1) = std::max(g(n - 1), upper);
  return g;
}

std::pair<double, double> spectral_envelope(const ExperimentConfig& cfg) {
  const auto [a, b] = cfg.density.support();
  double vmin = 0, vmax = 0;
  for (const auto& t : cfg.u.terms()) {
    vmin += std::min(t.value * a, t.value * b);
    vmax += std::max(t.value * a, t.value * b);
  }
  const double shift = cfg.laplacian == Laplacian::shifted ? 2.0 * cfg.d : 0.0;
  return {shift - 2.0 * cfg.d + cfg.lambda * vmin - 1.0, shift + 2.0 * cfg.d + cfg.lambda * vmax + 1.0};
}

EmpiricalIds empirical_ids(const ExperimentConfig& cfg, int L_ids, std::size_t realizations,
                           const Eigen::VectorXd& grid) {
  if (L_ids < 1) throw std::invalid_argument("empirical_ids: L_ids must be >= 1");
  if (grid.size() < 2) throw std::invalid_argument("empirical_ids: grid needs at least two points");
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    if (!(grid(i) > grid(i - 1))) throw std::invalid_argument("empirical_ids: grid must be strictly ascending");
  ExperimentConfig c = cfg;
  c.L = L_ids;
  c.n_samples = realizations;
  validate(c);
  const Box box = c.box();
  if (c.d > 1 && box.size() > kMaxDenseDimension)
    throw std::length_error("empirical_ids: box exceeds the dense limit 4096; reduce L_ids or d");
  const double volume = static_cast<double>(box.size());

  const auto table = run_parallel(realizations, grid.size(), c.workers, [&](std::size_t i, std::span<double> row) {
    const Eigen::VectorXd e = eigenvalues(sample_hamiltonian(c, i));
    if (e(0) < grid(0) || e(e.size() - 1) > grid(grid.size() - 1)) {
      std::ostringstream msg;
      msg << "empirical_ids: eigenvalues escape the grid [" << grid(0) << ", " << grid(grid.size() - 1) << "]:";
      for (Eigen::Index j = 0; j < e.size(); ++j)
        if (e(j) < grid(0) || e(j) > grid(grid.size() - 1)) msg << ' ' << e(j);
      throw std::out_of_range(msg.str());
    }
    Eigen::Index j = 0;
    for (Eigen::Index k = 0; k < grid.size(); ++k) {
      while (j < e.size() && e(j) <= grid(k)) ++j;
      row[k] = static_cast<double>(j) / volume;
    }
  });

  EmpiricalIds ids;
  ids.grid = grid;
  ids.values.resize(grid.size());
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const auto col = table.column(k);
    ids.values(k) = pairwise_sum(std::span<const double>(col)) / static_cast<double>(col.size());
  }
  // Averages of monotone step functions; the running max only removes rounding noise.
  for (Eigen::Index k = 1; k < grid.size(); ++k) ids.values(k) = std::max(ids.values(k), ids.values(k - 1));
  ids.d = c.d;
  ids.L_ids = L_ids;
  ids.realizations = table.rows() - table.failures;
  ids.lambda = c.lambda;
  ids.seed = c.seed;
  return ids;
}

RescaledSample rescale(std::span<const double> eigenvalues, const EmpiricalIds& ids, double E0, int L, int d) {
  if (!ids.covers(E0) || E0 == ids.grid(0) || E0 == ids.grid(ids.grid.size() - 1))
    throw std::out_of_range("rescale: E0 must lie inside the IDS grid");
  double volume = 1;
  for (int i = 0; i < d; ++i) volume *= 2.0 * L + 1.0;
  RescaledSample r;
  r.E0 = E0;
  r.L = L;
  const double n0 = ids(E0);
  r.xi.reserve(eigenvalues.size());
  for (double e : eigenvalues) {
    if (!ids.covers(e)) {
      std::ostringstream msg;
      msg << "rescale: eigenvalue " << e << " outside the IDS grid (grid misconfiguration)";
      throw std::out_of_range(msg.str());
    }
    r.xi.push_back(volume * (ids(e) - n0));
  }
  std::sort(r.xi.begin(), r.xi.end());
  return r;
}

std::vector<RescaledSample> rescaled_realizations(const ExperimentConfig& cfg, const EmpiricalIds& ids, double E0) {
  validate(cfg);
  const Box box = cfg.box();
  if (cfg.d > 1 && box.size() > kMaxDenseDimension)
    throw std::length_error("rescaled_realizations: box exceeds the dense limit 4096; reduce L or d");
  const auto table = run_parallel(cfg.n_samples, box.size(), cfg.workers, [&](std::size_t i, std::span<double> row) {
    const Eigen::VectorXd e = eigenvalues(sample_hamiltonian(cfg, i));
    std::copy(e.data(), e.data() + e.size(), row.begin());
  });
  std::vector<RescaledSample> out;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    if (!table.ok[i]) continue;
    const std::span<const double> e(table.values.data() + i * table.columns, static_cast<std::size_t>(table.columns));
    out.push_back(rescale(e, ids, E0, cfg.L, cfg.d));
  }
  return out;
}

namespace {

int count_in(const std::vector<double>& xi, const Interval& I) {
  return static_cast<int>(std::lower_bound(xi.begin(), xi.end(), I.upper) -
                          std::lower_bound(xi.begin(), xi.end(), I.lower));
}

}  // namespace

bool PointProcessStats::pass() const { return !inconclusive && ks.pass && chi_square.pass && correlation_pass; }

PointProcessStats poisson_tests(std::span<const RescaledSample> samples, const PoissonTestOptions& options) {
  if (samples.size() < 200) throw std::invalid_argument("poisson_tests: need at least 200 realizations");
  const Interval& w = options.window;
  if (!(w.length() > 0 && w.length() <= 10)) throw std::invalid_argument("poisson_tests: window length must be in (0, 10]");
  if (options.first.upper > options.second.lower && options.second.upper > options.first.lower)
    throw std::invalid_argument("poisson_tests: correlation intervals must be disjoint");

  PointProcessStats st;
  st.window = w;
  std::vector<double> first, second, unit, per_length;
  for (const auto& s : samples) {
    st.counts.push_back(count_in(s.xi, w));
    per_length.push_back(st.counts.back() / w.length());
    first.push_back(count_in(s.xi, options.first));
    second.push_back(count_in(s.xi, options.second));
    unit.push_back(count_in(s.xi, options.unit));
    // Gaps start at a point of [a, b); the right neighbour may lie beyond b.
    for (std::size_t j = 0; j + 1 < s.xi.size(); ++j)
      if (s.xi[j] >= w.lower && s.xi[j] < w.upper) st.gaps.push_back(s.xi[j + 1] - s.xi[j]);
  }
  st.inconclusive = st.gaps.size() < 50;
  st.ks = ks_test_exponential(st.gaps);
  st.chi_square = chi_square_poisson(st.counts, w.length());
  st.correlation = pearson_correlation(first, second);
  st.correlation_threshold = 3.0 / std::sqrt(static_cast<double>(samples.size()));
  st.correlation_pass = std::abs(st.correlation) < st.correlation_threshold;
  const auto m = sample_moments(unit);
  st.unit_mean = m.mean;
  st.unit_std_error = m.std_error;
  const auto wm = sample_moments(per_length);
  st.window_intensity = wm.mean;
  st.window_intensity_std_error = wm.std_error;
  st.intensity_pass = std::abs(wm.mean - 1.0) <= 0.1 && std::abs(m.mean - options.unit.length()) <= 3.0 * m.std_error;
  return st;
}

std::vector<RescaledSample> synthetic_poisson(std::size_t realizations, Interval range, std::uint64_t seed) {
  std::vector<RescaledSample> out(realizations);
  for (std::size_t r = 0; r < realizations; ++r) {
    RandomStream stream(seed, r);
    for (double x = range.lower - std::log1p(-stream.uniform()); x < range.upper; x -= std::log1p(-stream.uniform()))
      out[r].xi.push_back(x);
  }
  return out;
}

std::vector<RescaledSample> picket_fence(std::size_t realizations, Interval range) {
  RescaledSample s;
  for (double j = std::ceil(range.lower); j <= range.upper; j += 1.0) s.xi.push_back(j);
  return std::vector<RescaledSample>(realizations, s);
}

PosReport probe_pos(const EmpiricalIds& ids, double E0, double kappa, double a, double b,
                    std::span<const double> epsilons) {
  if (!(a < b)) throw std::invalid_argument("probe_pos: need a < b");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0)) throw std::invalid_argument("probe_pos: epsilons must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw std::invalid_argument("probe_pos: epsilons must decrease");
  }
  PosReport r;
  std::vector<double> xs, ys;
  bool positive = true;
  for (double eps : epsilons) {
    PosRow row;
    row.epsilon = eps;
    row.difference = std::abs(ids(E0 + a * eps) - ids(E0 + b * eps));
    row.reference = std::pow(eps, 1.0 + kappa);
    r.rows.push_back(row);
    if (row.difference > 1e-12) {
      xs.push_back(std::log(eps));
      ys.push_back(std::log(row.difference));
    } else {
      positive = false;
    }
  }
  if (xs.size() >= 2) r.exponent = least_squares_line(xs, ys).slope;
  r.reliable = positive && xs.size() >= 2;
  return r;
}

}  // namespace alloy
