#pragma once

#include "alloy/disorder.hpp"
#include "alloy/lattice.hpp"
#include "alloy/operator.hpp"
#include "alloy/transform.hpp"

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace alloy {

enum class Verdict { within_bound, violated_beyond_3sigma, inconclusive };

std::string_view to_string(Verdict v);

struct Interval {
  double lower = 0;
  double upper = 0;
  double length() const { return upper - lower; }
  static Interval centered(double center, double width) { return {center - width / 2, center + width / 2}; }
};

/// Physical model plus the sampling parameters of one Monte Carlo run.
struct ExperimentConfig {
  int d = 1;
  int L = 0;
  SingleSitePotential u;
  DisorderDensity density;
  double lambda = 0;
  Laplacian laplacian = Laplacian::adjacency;
  std::complex<double> z{0.0, 1.0};
  Interval J;
  Site x, y;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string digest;

  Box box() const { return Box::centered(d, L); }
  /// Lambda_{L+R}: every coupling that reaches the box.
  Box coupling_box() const { return Box::centered(d, L + u.support_radius()); }
};

/// Throws std::invalid_argument on an inconsistent configuration.
void validate(const ExperimentConfig& cfg);

/// Hamiltonian of sample `index` (stream derived from (seed, index)).
HamiltonianSample sample_hamiltonian(const ExperimentConfig& cfg, std::uint64_t stream_id);

struct MCEstimate {
  std::string estimator;
  double mean = 0;
  double std_error = 0;
  std::size_t n_samples = 0;
  std::optional<double> bound;
  Verdict verdict = Verdict::inconclusive;
  std::uint64_t seed = 0;
  std::string digest;
  std::size_t failures = 0;
};

/// mean <= bound + 3 stderr.
Verdict three_sigma_verdict(double mean, double std_error, std::optional<double> bound, std::size_t n);

/// Result of a parallel map over samples: row i holds the values of sample i.
struct SampleTable {
  Eigen::Index columns = 0;
  std::vector<double> values;  // row-major, n x columns
  std::vector<char> ok;        // false for samples lost to SolverFailure
  std::size_t failures = 0;
  std::string first_failure;

  std::size_t rows() const { return ok.size(); }
  double operator()(std::size_t row, Eigen::Index col) const { return values[row * columns + col]; }
  /// Column `col` over the successful rows, in sample order.
  std::vector<double> column(Eigen::Index col) const;
};

using SampleKernel = std::function<void(std::size_t index, std::span<double> row)>;

/// Fills row i with kernel(i, row) for i < n on `workers` threads. Rows are
/// indexed by sample, so the table does not depend on the worker count.
/// SolverFailure marks a row as failed; any other exception aborts the run
/// and is rethrown (the one with the smallest sample index). More than 0.1%
/// failed rows is an error.
SampleTable run_parallel(std::size_t n, Eigen::Index columns, unsigned workers, const SampleKernel& kernel);

/// Mean and stderr of one table column with the 3 sigma verdict.
MCEstimate summarize(const SampleTable& table, Eigen::Index col, std::string estimator, std::optional<double> bound,
                     const ExperimentConfig& cfg);

struct MinamiPoint {
  std::complex<double> z;
  MCEstimate estimate;  // bound = (pi / lambda)^2 C_Min
  double sharp_bound = 0;
  Verdict sharp_verdict = Verdict::inconclusive;
  std::optional<double> classical_bound;         // pi^2 ||rho||_inf^2 (u = delta_0 only)
  std::optional<double> classical_bound_scaled;  // (pi / lambda)^2 ||rho||_inf^2
  Verdict classical_verdict = Verdict::inconclusive;
  Verdict classical_scaled_verdict = Verdict::inconclusive;
  double min_sample = 0;
  double max_sample = 0;
};

struct MinamiReport {
  MinamiConstants constants;
  CuBound cu;
  std::vector<MinamiPoint> points;
  bool all_within() const;
};

/// E det Im G_Lambda(z; x, y) at each z, with one shared sample set. Every
/// sample must lie in (0, (Im z)^-2], otherwise NumericalFault.
MinamiReport estimate_minami(const ExperimentConfig& cfg, std::span<const std::complex<double>> zs);
MinamiReport estimate_minami(const ExperimentConfig& cfg);

struct WegnerPoint {
  Interval J;
  MCEstimate estimate;  // mean of Tr chi_J(H)
  double ratio = 0;     // mean / (|J| |Lambda|)
  double ratio_std_error = 0;
};

struct WegnerSweep {
  std::vector<WegnerPoint> points;
  double spread = 0;  // max ratio / min ratio
  bool stable = false;  // spread <= 1.2
};

/// Counts on one shared sample set for intervals of each width around `center`.
WegnerSweep wegner_sweep(const ExperimentConfig& cfg, double center, std::span<const double> widths);
WegnerPoint estimate_wegner(const ExperimentConfig& cfg);

struct TwoEigenvalueReport {
  Interval I;
  MCEstimate probability;      // P{Tr chi_I >= 2}
  MCEstimate factorial_moment; // (1/2) E(Tr chi_I^2 - Tr chi_I)
  std::optional<double> bound; // (1/2) (pi / lambda)^2 C_Min |I|^2 |Lambda|^2
  std::size_t samples_with_two = 0;
  double half_pair_sum = 0;    // sum over samples of k(k-1)/2
  bool markov_exact = false;   // P^ <= (1/2) E^ on the sample set, exactly
  Verdict markov_verdict = Verdict::inconclusive;  // P^ <= (1/2)E^ + 3 combined stderr
  Verdict bound_verdict = Verdict::inconclusive;
  bool passed() const;
};

TwoEigenvalueReport estimate_two_eigenvalue_probability(const ExperimentConfig& cfg);
std::vector<TwoEigenvalueReport> two_eigenvalue_sweep(const ExperimentConfig& cfg, double center,
                                                      std::span<const double> widths);

struct FvcPoint {
  int L = 0;
  double probability = 0;
  double std_error = 0;
  std::size_t n_samples = 0;
  std::size_t resampled = 0;
  double threshold = 0;  // L^-Theta
};

/// Fraction of samples whose Green function at E + 1e-8 i satisfies
/// |G(x, y)| <= L^-Theta for every pair with |x - y|_inf >= L / 2.
std::vector<FvcPoint> probe_fvc(const ExperimentConfig& cfg, double energy, double theta, std::span<const int> radii);

struct FmbPoint {
  int distance = 0;
  double mean = 0;  // E |G(E + i eps; x, y)|^s
  double std_error = 0;
};

struct FmbReport {
  std::vector<FmbPoint> points;
  double amplitude = 0;  // A
  double gamma = 0;      // decay rate
  double r_squared = 0;
};

FmbReport probe_fractional_moment(const ExperimentConfig& cfg, double energy, double epsilon, double s,
                                  std::span<const std::pair<Site, Site>> pairs);

/// Pairs (0, r e_1) for r = 1..L.
std::vector<std::pair<Site, Site>> axis_pairs(int d, int L);

struct IadReport {
  double correlation = 0;
  double threshold = 0;  // 3 / sqrt(n)
  double mean_left = 0;
  double mean_right = 0;
  bool uncorrelated = false;
};

/// Correlation of Tr chi_J in two copies of Lambda_L whose coupling sets are
/// disjoint, driven by one coupling field.
IadReport probe_iad(const ExperimentConfig& cfg, int separation);

}  // namespace alloy
