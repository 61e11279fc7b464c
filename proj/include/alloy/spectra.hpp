#pragma once

#include "alloy/estimators.hpp"
#include "alloy/stats.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace alloy {

/// Averaged normalized eigenvalue counting function on an energy grid.
struct EmpiricalIds {
  Eigen::VectorXd grid;    // ascending
  Eigen::VectorXd values;  // N^(E) per grid point
  int d = 1;
  int L_ids = 0;
  std::size_t realizations = 0;
  double lambda = 0;
  std::uint64_t seed = 0;

  /// Piecewise-linear interpolant; throws std::out_of_range off the grid.
  double operator()(double energy) const;
  /// Smallest grid-interpolated energy with N^(E) = p.
  double quantile(double p) const;
  bool covers(double energy) const { return energy >= grid(0) && energy <= grid(grid.size() - 1); }
};

Eigen::VectorXd uniform_grid(double lower, double upper, double step);

/// [-2d + lambda min V, 2d + lambda max V] (plus the Laplacian shift), padded by 1.
std::pair<double, double> spectral_envelope(const ExperimentConfig& cfg);

/// IDS from `realizations` boxes of radius L_ids; uses cfg.seed, cfg.workers
/// and the model fields of cfg (cfg.L is ignored).
EmpiricalIds empirical_ids(const ExperimentConfig& cfg, int L_ids, std::size_t realizations,
                           const Eigen::VectorXd& grid);

struct RescaledSample {
  std::vector<double> xi;  // ascending
  double E0 = 0;
  int L = 0;
};

/// xi_j = |Lambda_L| (N^(E_j) - N^(E0)).
RescaledSample rescale(std::span<const double> eigenvalues, const EmpiricalIds& ids, double E0, int L, int d);

/// Rescaled spectra of cfg.n_samples boxes Lambda_{cfg.L}.
std::vector<RescaledSample> rescaled_realizations(const ExperimentConfig& cfg, const EmpiricalIds& ids, double E0);

struct PoissonTestOptions {
  Interval window{-5.0, 5.0};
  Interval first{0.0, 1.0};   // correlation intervals, disjoint
  Interval second{1.0, 2.0};
  Interval unit{0.0, 1.0};    // intensity check
};

struct PointProcessStats {
  Interval window;
  std::vector<int> counts;   // per realization, in the window
  std::vector<double> gaps;  // gaps whose left point lies in the window
  KsResult ks;
  ChiSquareResult chi_square;
  double correlation = 0;
  double correlation_threshold = 0;  // 3 / sqrt(#realizations)
  bool correlation_pass = false;
  double unit_mean = 0;  // count in options.unit
  double unit_std_error = 0;
  double window_intensity = 0;  // mean count per unit length over the window
  double window_intensity_std_error = 0;
  /// Window intensity within 1.0 +- 0.1 and the unit count within 3 stderr
  /// of its length.
  bool intensity_pass = false;
  bool inconclusive = false;    // fewer than 50 gaps
  bool pass() const;
};

/// KS of gaps against Exp(1), chi-square of window counts against
/// Poisson(|window|) and the count correlation of two disjoint intervals.
PointProcessStats poisson_tests(std::span<const RescaledSample> samples, const PoissonTestOptions& options = {});

/// Unit-intensity Poisson points on `range`, one realization per stream.
std::vector<RescaledSample> synthetic_poisson(std::size_t realizations, Interval range, std::uint64_t seed);
/// xi = j for every integer j in `range`.
std::vector<RescaledSample> picket_fence(std::size_t realizations, Interval range);

struct PosRow {
  double epsilon = 0;
  double difference = 0;  // |N^(E0 + a eps) - N^(E0 + b eps)|
  double reference = 0;   // eps^(1 + kappa)
};

struct PosReport {
  std::vector<PosRow> rows;
  double exponent = 0;  // log-log slope
  bool reliable = false;
};

PosReport probe_pos(const EmpiricalIds& ids, double E0, double kappa, double a, double b,
                    std::span<const double> epsilons);

}  // namespace alloy
