#pragma once

#include "alloy/lattice.hpp"
#include "alloy/polynomial.hpp"
#include "alloy/random.hpp"

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace alloy {

struct PotentialTerm {
  Site offset;
  double value;
};

/// Finitely supported single-site potential u : Z^d -> R.
class SingleSitePotential {
 public:
  /// u = delta_0 in one dimension.
  SingleSitePotential() : SingleSitePotential(delta(1)) {}
  /// Zero values are dropped; duplicate offsets and mixed dimensions are rejected.
  explicit SingleSitePotential(std::vector<PotentialTerm> terms);

  static SingleSitePotential delta(int dim);

  int dim() const { return dim_; }
  /// Smallest R with supp u inside Lambda_R.
  int support_radius() const { return radius_; }
  const std::vector<PotentialTerm>& terms() const { return terms_; }

  double operator()(const Site& k) const;
  double l1_norm() const;
  double mean_value() const;  // sum_k u(k)

 private:
  std::vector<PotentialTerm> terms_;
  int dim_ = 1;
  int radius_ = 0;
};

/// envelope_box with a check against the potential's own support radius.
Box envelope_box(const Box& lambda_box, const SingleSitePotential& u, int support_radius);

/// u^(theta) = sum_k u(k) exp(i k . theta).
std::complex<double> fourier_u(const SingleSitePotential& u, const Eigen::Ref<const Eigen::VectorXd>& theta);

struct DensityNorms {
  double sup = 0;  // ||rho||_inf
  double d1 = 0;   // ||rho'||_1
  double d2 = 0;   // ||rho''||_1
};

struct RaisedCosine {
  double center;
  double half_width;
};

/// Compactly supported probability density in W^{2,1}(R): either a piecewise
/// polynomial (norms by exact piecewise integration) or a raised cosine
/// (closed-form norms). Immutable; construction validates every invariant.
class DisorderDensity {
 public:
  /// The C^2 bump 30 s^2 (1-s)^2 on [0, 1].
  DisorderDensity() : DisorderDensity(bump(0.0, 1.0)) {}

  static DisorderDensity bump(double lower, double upper);
  static DisorderDensity raised_cosine(double center, double half_width);
  static DisorderDensity piecewise(PiecewisePolynomial<double> rho, std::string name = "piecewise");

  double pdf(double t) const;
  double cdf(double t) const;
  /// Inverse CDF by bisection to an absolute width of 1e-12.
  double quantile(double p) const;

  std::pair<double, double> support() const { return support_; }
  const DensityNorms& norms() const { return norms_; }
  const std::string& name() const { return name_; }
  double mean() const;
  bool is_piecewise() const { return std::holds_alternative<PiecewisePolynomial<double>>(shape_); }
  const PiecewisePolynomial<double>& polynomial() const { return std::get<PiecewisePolynomial<double>>(shape_); }

 private:
  DisorderDensity(std::variant<PiecewisePolynomial<double>, RaisedCosine> shape, std::string name);

  std::variant<PiecewisePolynomial<double>, RaisedCosine> shape_;
  std::string name_;
  std::pair<double, double> support_;
  DensityNorms norms_;
  std::vector<double> piece_mass_;  // cumulative mass at each knot (piecewise only)
};

struct DensityValidation {
  bool ok = true;
  std::string message;
  double integral = 0;
  double continuity_defect = 0;            // rho, including the ends
  double derivative_continuity_defect = 0; // rho'
  double minimum = 0;
};

/// Checks the W^{2,1} density invariants: rho >= 0, integral 1, rho and rho'
/// continuous across knots and vanishing at both ends.
DensityValidation validate_density(const PiecewisePolynomial<double>& rho);

struct AssumptionReport {
  double fourier_min_modulus = 0;
  Eigen::VectorXd argmin;      // grid point attaining the minimum
  double lipschitz_slack = 0;  // ||u||_1 * R * d * (pi / N)
  int grid_resolution = 0;
  bool dominance_holds = false;
  bool density_in_w21 = false;
  bool satisfied = false;  // dominance, or grid minimum minus slack > 0
  std::string diagnostic;
};

/// Minimum of |u^| over the uniform grid (2 pi m / N)^d plus the certificate
/// logic. N must be at least 2 (2R + 1).
AssumptionReport check_assumption(const SingleSitePotential& u, const DisorderDensity& density, int grid_resolution);

/// check_assumption with N doubled from the Nyquist floor until the
/// certificate closes or the grid reaches `max_points` points.
AssumptionReport certify_assumption(const SingleSitePotential& u, const DisorderDensity& density,
                                    long max_points = 1L << 22);

/// Couplings omega_k for k in `domain`, in the domain's enumeration order.
struct CouplingConfiguration {
  Box domain;
  Eigen::VectorXd values;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  double at(const Site& k) const;
};

CouplingConfiguration sample_couplings(const DisorderDensity& density, const Box& box, RandomStream& stream);

/// Two-variable test function. Only tensor products f = g (x) h (exactly two
/// factors) are accepted by sobolev_ratio.
struct TestFunction2D {
  std::vector<PiecewisePolynomial<double>> factors;
};

struct SobolevRatio {
  double sup_norm = 0;    // ||f||_inf
  double mixed_norm = 0;  // ||D^(1,1) f||_1 = ||g'||_1 ||h'||_1
  double ratio = 0;
};

SobolevRatio sobolev_ratio(const TestFunction2D& f);

/// Hat function rising linearly from 0 at `lower` to `height` at `peak`, back
/// to 0 at `upper`.
PiecewisePolynomial<double> hat_function(double lower, double peak, double upper, double height = 1.0);

/// The bump profile 30 s^2 (1-s)^2 on [lower, upper], normalised to unit mass.
PiecewisePolynomial<double> bump_profile(double lower, double upper);

}  // namespace alloy
