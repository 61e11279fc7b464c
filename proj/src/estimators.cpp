#include "alloy/estimators.hpp"

#include "alloy/errors.hpp"
#include "alloy/random.hpp"
#include "alloy/stats.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace alloy {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::within_bound: return "within_bound";
    case Verdict::violated_beyond_3sigma: return "violated_beyond_3sigma";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.d < 1) throw std::invalid_argument("config: d must be >= 1");
  if (cfg.u.dim() != cfg.d) throw std::invalid_argument("config: potential dimension differs from d");
  if (cfg.L < 0) throw std::invalid_argument("config: L must be >= 0");
  if (!(cfg.lambda >= 0) || !std::isfinite(cfg.lambda)) throw std::invalid_argument("config: lambda must be >= 0");
  if (cfg.workers < 1) throw std::invalid_argument("config: worker count must be >= 1");
  if (!(cfg.z.imag() > 0)) throw std::invalid_argument("config: Im z must be positive");
  if (!std::isfinite(cfg.J.lower) || !std::isfinite(cfg.J.upper) || cfg.J.lower > cfg.J.upper)
    throw std::invalid_argument("config: interval J must be bounded with lower <= upper");
  const Box box = cfg.box();
  for (const Site* s : {&cfg.x, &cfg.y})
    if (s->size() != 0 && (s->size() != cfg.d || !box.contains(*s)))
      throw std::invalid_argument("config: sites x, y must lie in Lambda_L");
}

namespace {

void require_pair(const ExperimentConfig& cfg) {
  if (cfg.x.size() == 0 || cfg.y.size() == 0) throw std::invalid_argument("config: sites x and y are required");
  if (cfg.x == cfg.y) throw std::invalid_argument("config: x and y must differ");
}

void require_certified(const ExperimentConfig& cfg) {
  const auto report = certify_assumption(cfg.u, cfg.density);
  if (!report.satisfied) throw AssumptionViolated("assumption on (rho, u) not certified: " + report.diagnostic);
}

bool is_delta0(const SingleSitePotential& u) {
  return u.terms().size() == 1 && u.terms().front().offset.isZero() && u.terms().front().value == 1.0;
}

MinamiConstants constants_for(const ExperimentConfig& cfg) {
  require_certified(cfg);
  const auto t = build_circulant(cfg.u, cfg.box());
  return minami_constants(t, cfg.density, cfg.lambda, cfg.x, cfg.y);
}

}  // namespace

HamiltonianSample sample_hamiltonian(const ExperimentConfig& cfg, std::uint64_t stream_id) {
  RandomStream stream(cfg.seed, stream_id);
  return build_hamiltonian(cfg.box(), cfg.u, sample_couplings(cfg.density, cfg.coupling_box(), stream), cfg.lambda,
                           cfg.laplacian);
}

Verdict three_sigma_verdict(double mean, double std_error, std::optional<double> bound, std::size_t n) {
  if (!bound || n < 2 || !std::isfinite(mean)) return Verdict::inconclusive;
  return mean <= *bound + 3.0 * std_error ? Verdict::within_bound : Verdict::violated_beyond_3sigma;
}

std::vector<double> SampleTable::column(Eigen::Index col) const {
  std::vector<double> out;
  out.reserve(rows());
  for (std::size_t i = 0; i < rows(); ++i)
    if (ok[i]) out.push_back((*this)(i, col));
  return out;
}

SampleTable run_parallel(std::size_t n, Eigen::Index columns, unsigned workers, const SampleKernel& kernel) {
  if (n == 0) throw std::invalid_argument("empty sample");
  if (workers < 1) throw std::invalid_argument("run_parallel: worker count must be >= 1");
  if (columns < 1) throw std::invalid_argument("run_parallel: need at least one column");

  SampleTable table;
  table.columns = columns;
  table.values.assign(n * static_cast<std::size_t>(columns), 0.0);
  table.ok.assign(n, 1);

  struct WorkerState {
    std::size_t failure_index = std::numeric_limits<std::size_t>::max();
    std::string failure;
    std::size_t error_index = std::numeric_limits<std::size_t>::max();
    std::exception_ptr error;
  };
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::vector<WorkerState> state(threads);
  std::atomic<bool> abort{false};

  auto work = [&](unsigned w) {
    const std::size_t begin = n * w / threads, end = n * (w + 1) / threads;
    for (std::size_t i = begin; i < end && !abort.load(std::memory_order_relaxed); ++i) {
      std::span<double> row(table.values.data() + i * columns, static_cast<std::size_t>(columns));
      try {
        kernel(i, row);
      } catch (const SolverFailure& e) {
        table.ok[i] = 0;
        if (i < state[w].failure_index) {
          state[w].failure_index = i;
          state[w].failure = e.what();
        }
      } catch (...) {
        state[w].error_index = i;
        state[w].error = std::current_exception();
        abort = true;
        return;
      }
    }
  };

  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  const WorkerState* first_error = nullptr;
  const WorkerState* first_failure = nullptr;
  for (const auto& s : state) {
    if (s.error && (!first_error || s.error_index < first_error->error_index)) first_error = &s;
    if (!s.failure.empty() && (!first_failure || s.failure_index < first_failure->failure_index)) first_failure = &s;
  }
  if (first_error) std::rethrow_exception(first_error->error);

  table.failures = static_cast<std::size_t>(std::count(table.ok.begin(), table.ok.end(), 0));
  if (first_failure) table.first_failure = first_failure->failure;
  if (table.failures * 1000 > n) {
    std::ostringstream msg;
    msg << "run failed: " << table.failures << " of " << n << " samples hit solver failures (cap 0.1%); first: "
        << table.first_failure;
    throw std::runtime_error(msg.str());
  }
  return table;
}

MCEstimate summarize(const SampleTable& table, Eigen::Index col, std::string estimator, std::optional<double> bound,
                     const ExperimentConfig& cfg) {
  const auto values = table.column(col);
  if (values.empty()) throw std::runtime_error("empty sample");
  const auto m = sample_moments(values);
  MCEstimate e;
  e.estimator = std::move(estimator);
  e.mean = m.mean;
  e.std_error = m.std_error;
  e.n_samples = m.n;
  e.bound = bound;
  e.verdict = three_sigma_verdict(m.mean, m.std_error, bound, m.n);
  e.seed = cfg.seed;
  e.digest = cfg.digest;
  e.failures = table.failures;
  return e;
}

// ---------------------------------------------------------------------------
// Minami

bool MinamiReport::all_within() const {
  for (const auto& p : points) {
    if (p.estimate.verdict != Verdict::within_bound) return false;
    if (p.classical_bound_scaled && p.classical_scaled_verdict != Verdict::within_bound) return false;
  }
  return !points.empty();
}

MinamiReport estimate_minami(const ExperimentConfig& cfg, std::span<const std::complex<double>> zs) {
  validate(cfg);
  require_pair(cfg);
  if (!(cfg.lambda > 0)) throw std::invalid_argument("estimate_minami: lambda must be positive");
  if (zs.empty()) throw std::invalid_argument("estimate_minami: no spectral parameters");
  for (const auto& z : zs)
    if (!(z.imag() > 0)) throw std::invalid_argument("estimate_minami: Im z must be positive");
  if (cfg.box().size() > kMaxDenseDimension)
    throw std::length_error("estimate_minami: box exceeds the dense limit 4096; reduce L or d");

  MinamiReport report;
  report.constants = constants_for(cfg);
  report.cu = infinite_cu(cfg.u);

  const std::vector<std::complex<double>> z_list(zs.begin(), zs.end());
  const auto table = run_parallel(cfg.n_samples, static_cast<Eigen::Index>(z_list.size()), cfg.workers,
                                  [&](std::size_t i, std::span<double> row) {
                                    const auto h = sample_hamiltonian(cfg, i);
                                    for (std::size_t k = 0; k < z_list.size(); ++k) {
                                      const double det = green_block(h, z_list[k], cfg.x, cfg.y).det_imag();
                                      const double envelope = 1.0 / (z_list[k].imag() * z_list[k].imag());
                                      if (!(det > 0.0) || !(det <= envelope)) {
                                        std::ostringstream msg;
                                        msg << "det Im G = " << det << " outside (0, " << envelope << "] at sample "
                                            << i;
                                        throw NumericalFault(msg.str());
                                      }
                                      row[k] = det;
                                    }
                                  });

  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double sup2 = cfg.density.norms().sup * cfg.density.norms().sup;
  for (std::size_t k = 0; k < z_list.size(); ++k) {
    MinamiPoint p;
    p.z = z_list[k];
    p.estimate = summarize(table, static_cast<Eigen::Index>(k), "minami", report.constants.theorem_bound, cfg);
    p.sharp_bound = report.constants.sharp_bound;
    p.sharp_verdict = three_sigma_verdict(p.estimate.mean, p.estimate.std_error, p.sharp_bound, p.estimate.n_samples);
    if (is_delta0(cfg.u)) {
      p.classical_bound = pi2 * sup2;
      p.classical_bound_scaled = pi2 * sup2 / (cfg.lambda * cfg.lambda);
      p.classical_verdict =
          three_sigma_verdict(p.estimate.mean, p.estimate.std_error, p.classical_bound, p.estimate.n_samples);
      p.classical_scaled_verdict =
          three_sigma_verdict(p.estimate.mean, p.estimate.std_error, p.classical_bound_scaled, p.estimate.n_samples);
    }
    const auto col = table.column(static_cast<Eigen::Index>(k));
    p.min_sample = *std::min_element(col.begin(), col.end());
    p.max_sample = *std::max_element(col.begin(), col.end());
    report.points.push_back(std::move(p));
  }
  return report;
}

MinamiReport estimate_minami(const ExperimentConfig& cfg) {
  const std::complex<double> z = cfg.z;
  return estimate_minami(cfg, std::span<const std::complex<double>>(&z, 1));
}

// ---------------------------------------------------------------------------
// Counting estimators

namespace {

void require_counting(const ExperimentConfig& cfg) {
  validate(cfg);
  if (cfg.n_samples < 1000) throw std::invalid_argument("counting estimators need n_samples >= 1000");
  if (cfg.d > 1 && cfg.box().size() > kMaxDenseDimension)
    throw std::length_error("counting estimators: box exceeds the dense limit 4096; reduce L or d");
}

SampleTable count_table(const ExperimentConfig& cfg, const std::vector<Interval>& intervals) {
  return run_parallel(cfg.n_samples, static_cast<Eigen::Index>(intervals.size()), cfg.workers,
                      [&](std::size_t i, std::span<double> row) {
                        const Eigen::VectorXd e = eigenvalues(sample_hamiltonian(cfg, i));
                        for (std::size_t k = 0; k < intervals.size(); ++k)
                          row[k] = static_cast<double>(count_in_interval(e, intervals[k].lower, intervals[k].upper));
                      });
}

WegnerPoint wegner_point(const SampleTable& table, Eigen::Index col, const Interval& J, const ExperimentConfig& cfg) {
  WegnerPoint p;
  p.J = J;
  p.estimate = summarize(table, col, "wegner", std::nullopt, cfg);
  const double scale = J.length() * static_cast<double>(cfg.box().size());
  if (scale > 0) {
    p.ratio = p.estimate.mean / scale;
    p.ratio_std_error = p.estimate.std_error / scale;
  }
  return p;
}

}  // namespace

WegnerSweep wegner_sweep(const ExperimentConfig& cfg, double center, std::span<const double> widths) {
  require_counting(cfg);
  if (widths.empty()) throw std::invalid_argument("wegner_sweep: no widths");
  std::vector<Interval> intervals;
  for (double w : widths) {
    if (!(w > 0) || !std::isfinite(w)) throw std::invalid_argument("wegner_sweep: widths must be positive and finite");
    intervals.push_back(Interval::centered(center, w));
  }
  const auto table = count_table(cfg, intervals);
  WegnerSweep sweep;
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (std::size_t k = 0; k < intervals.size(); ++k) {
    sweep.points.push_back(wegner_point(table, static_cast<Eigen::Index>(k), intervals[k], cfg));
    lo = std::min(lo, sweep.points.back().ratio);
    hi = std::max(hi, sweep.points.back().ratio);
  }
  sweep.spread = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
  sweep.stable = sweep.spread <= 1.2;
  return sweep;
}

WegnerPoint estimate_wegner(const ExperimentConfig& cfg) {
  require_counting(cfg);
  const auto table = count_table(cfg, {cfg.J});
  return wegner_point(table, 0, cfg.J, cfg);
}

bool TwoEigenvalueReport::passed() const {
  return markov_exact && markov_verdict != Verdict::violated_beyond_3sigma &&
         bound_verdict != Verdict::violated_beyond_3sigma;
}

std::vector<TwoEigenvalueReport> two_eigenvalue_sweep(const ExperimentConfig& cfg, double center,
                                                      std::span<const double> widths) {
  require_counting(cfg);
  if (widths.empty()) throw std::invalid_argument("two_eigenvalue_sweep: no widths");
  std::vector<Interval> intervals;
  for (double w : widths) {
    if (!(w > 0) || !std::isfinite(w)) throw std::invalid_argument("two_eigenvalue_sweep: widths must be positive");
    intervals.push_back(Interval::centered(center, w));
  }

  std::optional<MinamiConstants> constants;
  if (cfg.lambda > 0) {
    ExperimentConfig with_pair = cfg;
    // The constant does not depend on the pair; any two distinct sites will do.
    const Box box = cfg.box();
    if (box.size() >= 2) {
      with_pair.x = box.site(0);
      with_pair.y = box.site(1);
      constants = constants_for(with_pair);
    }
  }

  const auto counts = count_table(cfg, intervals);
  SampleTable derived;
  derived.columns = 2 * counts.columns;
  derived.ok = counts.ok;
  derived.failures = counts.failures;
  derived.values.resize(counts.rows() * static_cast<std::size_t>(derived.columns));
  for (std::size_t i = 0; i < counts.rows(); ++i)
    for (Eigen::Index k = 0; k < counts.columns; ++k) {
      const double c = counts(i, k);
      derived.values[i * derived.columns + 2 * k] = c >= 2 ? 1.0 : 0.0;
      derived.values[i * derived.columns + 2 * k + 1] = c * (c - 1) / 2;
    }

  const double volume = static_cast<double>(cfg.box().size());
  std::vector<TwoEigenvalueReport> out;
  for (std::size_t k = 0; k < intervals.size(); ++k) {
    TwoEigenvalueReport r;
    r.I = intervals[k];
    if (constants) {
      const double len = r.I.length();
      r.bound = 0.5 * constants->theorem_bound * len * len * volume * volume;
    }
    const auto col = static_cast<Eigen::Index>(2 * k);
    r.probability = summarize(derived, col, "two_ev_probability", std::nullopt, cfg);
    r.factorial_moment = summarize(derived, col + 1, "two_ev_factorial_moment", r.bound, cfg);
    for (double v : derived.column(col)) r.samples_with_two += v > 0 ? 1 : 0;
    for (double v : derived.column(col + 1)) r.half_pair_sum += v;  // integers, summed exactly
    r.markov_exact = static_cast<double>(r.samples_with_two) <= r.half_pair_sum;
    const double combined = std::hypot(r.probability.std_error, r.factorial_moment.std_error);
    r.markov_verdict = three_sigma_verdict(r.probability.mean, combined, r.factorial_moment.mean,
                                           r.probability.n_samples);
    r.bound_verdict = r.factorial_moment.verdict;
    r.probability.bound = r.factorial_moment.mean;
    r.probability.verdict = r.markov_verdict;
    out.push_back(std::move(r));
  }
  return out;
}

TwoEigenvalueReport estimate_two_eigenvalue_probability(const ExperimentConfig& cfg) {
  const double width = cfg.J.length();
  auto reports = two_eigenvalue_sweep(cfg, 0.5 * (cfg.J.lower + cfg.J.upper), std::span<const double>(&width, 1));
  reports.front().I = cfg.J;
  return reports.front();
}

// ---------------------------------------------------------------------------
// Localization probes

std::vector<FvcPoint> probe_fvc(const ExperimentConfig& cfg, double energy, double theta, std::span<const int> radii) {
  validate(cfg);
  if (!(theta > 3.0 * cfg.d - 1.0)) throw std::invalid_argument("probe_fvc: Theta must exceed 3d - 1");
  if (!std::isfinite(energy)) throw std::invalid_argument("probe_fvc: energy must be finite");
  constexpr double kEta = 1e-8;
  constexpr double kResonance = 1e-6;
  constexpr std::uint64_t kMaxAttempts = 64;

  std::vector<FvcPoint> out;
  for (int L : radii) {
    if (L < 1) throw std::invalid_argument("probe_fvc: radii must be >= 1");
    ExperimentConfig c = cfg;
    c.L = L;
    const Box box = c.box();
    if (box.size() > kMaxDenseDimension)
      throw std::length_error("probe_fvc: box exceeds the dense limit 4096; reduce L or d");
    const double threshold = std::pow(static_cast<double>(L), -theta);

    // Pairs with |x - y|_inf >= L / 2.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index a = 0; a < box.size(); ++a)
      for (Eigen::Index b = a + 1; b < box.size(); ++b)
        if (2 * inf_norm(box.site(a) - box.site(b)) >= L) pairs.emplace_back(a, b);

    const auto table = run_parallel(cfg.n_samples, 2, cfg.workers, [&](std::size_t i, std::span<double> row) {
      for (std::uint64_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const auto h = sample_hamiltonian(c, retry_stream_id(i, attempt));
        const Eigen::VectorXd e = eigenvalues(h);
        if ((e.array() - energy).abs().minCoeff() < kResonance) continue;
        const Eigen::MatrixXcd g = green_matrix(h, {energy, kEta});
        double worst = 0;
        for (const auto& [a, b] : pairs) worst = std::max(worst, std::abs(g(a, b)));
        row[0] = worst <= threshold ? 1.0 : 0.0;
        row[1] = static_cast<double>(attempt);
        return;
      }
      throw SolverFailure("probe_fvc: every redraw had an eigenvalue within 1e-6 of E");
    });

    const auto m = summarize(table, 0, "fvc", std::nullopt, c);
    FvcPoint p;
    p.L = L;
    p.probability = m.mean;
    p.std_error = m.std_error;
    p.n_samples = m.n_samples;
    p.threshold = threshold;
    for (double v : table.column(1)) p.resampled += static_cast<std::size_t>(v);
    const double draws = static_cast<double>(p.resampled + cfg.n_samples);
    if (static_cast<double>(p.resampled) > 0.01 * draws) {
      std::ostringstream msg;
      msg << "probe_fvc: excessive resampling at L = " << L << " (" << p.resampled << " near-resonant draws of "
          << draws << ")";
      throw std::runtime_error(msg.str());
    }
    out.push_back(p);
  }
  return out;
}

std::vector<std::pair<Site, Site>> axis_pairs(int d, int L) {
  std::vector<std::pair<Site, Site>> pairs;
  for (int r = 1; r <= L; ++r) pairs.emplace_back(origin(d), unit_vector(d, 0, r));
  return pairs;
}

FmbReport probe_fractional_moment(const ExperimentConfig& cfg, double energy, double epsilon, double s,
                                  std::span<const std::pair<Site, Site>> pairs) {
  validate(cfg);
  if (!(s > 0 && s < 1)) throw std::invalid_argument("probe_fractional_moment: s must lie in (0, 1)");
  if (!(epsilon > 0)) throw std::invalid_argument("probe_fractional_moment: epsilon must be positive");
  const Box box = cfg.box();
  if (box.size() > kMaxDenseDimension)
    throw std::length_error("probe_fractional_moment: box exceeds the dense limit 4096; reduce L or d");

  // Distinct source sites and distances.
  std::map<Eigen::Index, Eigen::Index> source_column;
  std::map<int, Eigen::Index> distance_column;
  struct Pair {
    Eigen::Index x, y;
    int distance;
  };
  std::vector<Pair> resolved;
  for (const auto& [x, y] : pairs) {
    if (x == y) throw std::invalid_argument("probe_fractional_moment: pairs with x = y are excluded");
    const auto ix = box.index_of(x), iy = box.index_of(y);
    if (!ix || !iy) throw std::invalid_argument("probe_fractional_moment: site outside Lambda_L");
    source_column.emplace(*ix, 0);
    const int dist = inf_norm(x - y);
    distance_column.emplace(dist, 0);
    resolved.push_back({*ix, *iy, dist});
  }
  if (distance_column.size() < 2) throw std::invalid_argument("probe_fractional_moment: need >= 2 distances");
  Eigen::Index k = 0;
  for (auto& [site, col] : source_column) col = k++;
  k = 0;
  for (auto& [dist, col] : distance_column) col = k++;
  std::vector<double> multiplicity(distance_column.size(), 0.0);
  for (const auto& p : resolved) multiplicity[distance_column[p.distance]] += 1.0;

  const std::complex<double> z(energy, epsilon);
  const auto table = run_parallel(
      cfg.n_samples, static_cast<Eigen::Index>(distance_column.size()), cfg.workers,
      [&](std::size_t i, std::span<double> row) {
        const auto h = sample_hamiltonian(cfg, i);
        Eigen::MatrixXcd a = h.dense().cast<std::complex<double>>();
        a.diagonal().array() -= z;
        Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(a.rows(), static_cast<Eigen::Index>(source_column.size()));
        for (const auto& [site, col] : source_column) rhs(site, col) = 1.0;
        const Eigen::MatrixXcd w = a.partialPivLu().solve(rhs);
        if (!w.allFinite()) throw SolverFailure("probe_fractional_moment: non-finite resolvent");
        std::fill(row.begin(), row.end(), 0.0);
        for (const auto& p : resolved)
          row[distance_column[p.distance]] += std::pow(std::abs(w(p.y, source_column[p.x])), s);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] /= multiplicity[c];
      });

  FmbReport report;
  std::vector<double> xs, ys;
  for (const auto& [dist, col] : distance_column) {
    const auto m = summarize(table, col, "fmb", std::nullopt, cfg);
    report.points.push_back({dist, m.mean, m.std_error});
    if (m.mean > 0) {
      xs.push_back(dist);
      ys.push_back(std::log(m.mean));
    }
  }
  if (xs.size() >= 2) {
    const auto fit = least_squares_line(xs, ys);
    report.amplitude = std::exp(fit.intercept);
    report.gamma = -fit.slope;
    report.r_squared = fit.r_squared;
  }
  return report;
}

IadReport probe_iad(const ExperimentConfig& cfg, int separation) {
  validate(cfg);
  if (separation < 1) throw std::invalid_argument("probe_iad: separation must be >= 1");
  if (cfg.n_samples < 2) throw std::invalid_argument("probe_iad: need at least two samples");
  const int reach = cfg.L + cfg.u.support_radius();
  const int offset = reach + separation;
  const Box field = Box::centered(cfg.d, offset + reach);
  const Box left(unit_vector(cfg.d, 0, -offset), cfg.L), right(unit_vector(cfg.d, 0, offset), cfg.L);
  if (cfg.d > 1 && left.size() > kMaxDenseDimension)
    throw std::length_error("probe_iad: box exceeds the dense limit 4096; reduce L or d");

  const auto table = run_parallel(cfg.n_samples, 2, cfg.workers, [&](std::size_t i, std::span<double> row) {
    RandomStream stream(cfg.seed, i);
    const auto omega = sample_couplings(cfg.density, field, stream);
    const auto hl = build_hamiltonian(left, cfg.u, omega, cfg.lambda, cfg.laplacian);
    const auto hr = build_hamiltonian(right, cfg.u, omega, cfg.lambda, cfg.laplacian);
    row[0] = static_cast<double>(count_in_interval(hl, cfg.J.lower, cfg.J.upper));
    row[1] = static_cast<double>(count_in_interval(hr, cfg.J.lower, cfg.J.upper));
  });

  IadReport r;
  const auto a = table.column(0), b = table.column(1);
  r.correlation = pearson_correlation(a, b);
  r.threshold = 3.0 / std::sqrt(static_cast<double>(a.size()));
  r.mean_left = sample_moments(a).mean;
  r.mean_right = sample_moments(b).mean;
  r.uncorrelated = std::abs(r.correlation) < r.threshold;
  return r;
}

}  // namespace alloy
