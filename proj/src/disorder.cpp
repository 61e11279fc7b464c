#include "alloy/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace alloy {

SingleSitePotential::SingleSitePotential(std::vector<PotentialTerm> terms) {
  for (auto& t : terms) {
    if (t.value == 0.0) continue;
    if (!std::isfinite(t.value)) throw std::invalid_argument("SingleSitePotential: non-finite value");
    if (!terms_.empty() && t.offset.size() != terms_.front().offset.size())
      throw std::invalid_argument("SingleSitePotential: offsets of different dimension");
    for (const auto& s : terms_)
      if (s.offset == t.offset) throw std::invalid_argument("SingleSitePotential: duplicate offset");
    terms_.push_back(std::move(t));
  }
  if (terms_.empty()) throw std::invalid_argument("SingleSitePotential: support must be non-empty");
  dim_ = static_cast<int>(terms_.front().offset.size());
  if (dim_ < 1) throw std::invalid_argument("SingleSitePotential: dimension must be >= 1");
  radius_ = 0;
  for (const auto& t : terms_) radius_ = std::max(radius_, inf_norm(t.offset));
}

SingleSitePotential SingleSitePotential::delta(int dim) {
  return SingleSitePotential({PotentialTerm{origin(dim), 1.0}});
}

double SingleSitePotential::operator()(const Site& k) const {
  for (const auto& t : terms_)
    if (t.offset == k) return t.value;
  return 0.0;
}

double SingleSitePotential::l1_norm() const {
  double s = 0;
  for (const auto& t : terms_) s += std::abs(t.value);
  return s;
}

double SingleSitePotential::mean_value() const {
  double s = 0;
  for (const auto& t : terms_) s += t.value;
  return s;
}

Box envelope_box(const Box& lambda_box, const SingleSitePotential& u, int support_radius) {
  if (support_radius < u.support_radius()) {
    std::ostringstream msg;
    msg << "envelope_box: R = " << support_radius << " is smaller than the support radius "
        << u.support_radius() << " of the single-site potential";
    throw std::invalid_argument(msg.str());
  }
  if (lambda_box.dim() != u.dim()) throw std::invalid_argument("envelope_box: dimension mismatch");
  return envelope_box(lambda_box, support_radius);
}

std::complex<double> fourier_u(const SingleSitePotential& u, const Eigen::Ref<const Eigen::VectorXd>& theta) {
  if (theta.size() != u.dim()) throw std::invalid_argument("fourier_u: theta has the wrong dimension");
  std::complex<double> s = 0;
  for (const auto& t : u.terms()) s += t.value * std::polar(1.0, t.offset.cast<double>().dot(theta));
  return s;
}

// ---------------------------------------------------------------------------
// Densities

PiecewisePolynomial<double> bump_profile(double lower, double upper) {
  if (!(upper > lower)) throw std::invalid_argument("bump_profile: empty support");
  const double w = upper - lower;
  const Polynomial<double> unit{0.0, 0.0, 30.0, -60.0, 30.0};
  return PiecewisePolynomial<double>({lower, upper}, {unit.composed_affine(1.0 / w, 0.0) * (1.0 / w)});
}

PiecewisePolynomial<double> hat_function(double lower, double peak, double upper, double height) {
  if (!(lower < peak && peak < upper)) throw std::invalid_argument("hat_function: need lower < peak < upper");
  return PiecewisePolynomial<double>(
      {lower, peak, upper},
      {Polynomial<double>{0.0, height / (peak - lower)}, Polynomial<double>{height, -height / (upper - peak)}});
}

DensityValidation validate_density(const PiecewisePolynomial<double>& rho) {
  DensityValidation v;
  const double sup = rho.sup_abs();
  const double scale = std::max(1.0, sup);
  const auto drho = rho.derivative();
  v.integral = rho.integral();
  v.continuity_defect = rho.continuity_defect();
  v.derivative_continuity_defect = drho.continuity_defect();
  v.minimum = rho.min();
  std::ostringstream msg;
  if (std::abs(v.integral - 1.0) > 1e-12) msg << "integral is " << v.integral << ", not 1; ";
  if (v.continuity_defect > 1e-9 * scale) msg << "rho is discontinuous (jump " << v.continuity_defect << "); ";
  if (v.derivative_continuity_defect > 1e-9 * std::max(scale, drho.sup_abs()))
    msg << "rho' is discontinuous (jump " << v.derivative_continuity_defect << "); ";
  if (v.minimum < -1e-12 * scale) msg << "rho takes the negative value " << v.minimum << "; ";
  v.message = msg.str();
  v.ok = v.message.empty();
  return v;
}

DisorderDensity::DisorderDensity(std::variant<PiecewisePolynomial<double>, RaisedCosine> shape, std::string name)
    : shape_(std::move(shape)), name_(std::move(name)) {
  if (auto* rho = std::get_if<PiecewisePolynomial<double>>(&shape_)) {
    const auto check = validate_density(*rho);
    if (!check.ok) throw std::invalid_argument("DisorderDensity: " + check.message);
    support_ = {rho->lower(), rho->upper()};
    norms_.sup = rho->sup_abs();
    norms_.d1 = rho->derivative_l1();
    norms_.d2 = rho->derivative().derivative_l1();
    piece_mass_.assign(1, 0.0);
    for (std::size_t i = 0; i < rho->piece_count(); ++i)
      piece_mass_.push_back(piece_mass_.back() + rho->piece(i).antiderivative()(rho->width(i)));
  } else {
    const auto rc = std::get<RaisedCosine>(shape_);
    if (!(rc.half_width > 0) || !std::isfinite(rc.center))
      throw std::invalid_argument("DisorderDensity: raised cosine needs a positive half width");
    const double s = rc.half_width;
    support_ = {rc.center - s, rc.center + s};
    norms_.sup = 1.0 / s;
    norms_.d1 = 2.0 / s;
    norms_.d2 = 2.0 * std::numbers::pi / (s * s);
  }
}

DisorderDensity DisorderDensity::bump(double lower, double upper) {
  return {bump_profile(lower, upper), "bump"};
}

DisorderDensity DisorderDensity::raised_cosine(double center, double half_width) {
  return {RaisedCosine{center, half_width}, "raised_cosine"};
}

DisorderDensity DisorderDensity::piecewise(PiecewisePolynomial<double> rho, std::string name) {
  return {std::move(rho), std::move(name)};
}

double DisorderDensity::pdf(double t) const {
  if (is_piecewise()) return polynomial()(t);
  const auto rc = std::get<RaisedCosine>(shape_);
  const double v = t - rc.center;
  if (std::abs(v) > rc.half_width) return 0.0;
  return (1.0 + std::cos(std::numbers::pi * v / rc.half_width)) / (2.0 * rc.half_width);
}

double DisorderDensity::cdf(double t) const {
  if (t <= support_.first) return 0.0;
  if (t >= support_.second) return 1.0;
  if (is_piecewise()) {
    const auto& rho = polynomial();
    const auto i = rho.locate(t);
    return piece_mass_[i] + rho.piece(i).antiderivative()(t - rho.knots()[i]);
  }
  const auto rc = std::get<RaisedCosine>(shape_);
  const double x = (t - rc.center) / rc.half_width;
  return 0.5 * (1.0 + x + std::sin(std::numbers::pi * x) / std::numbers::pi);
}

double DisorderDensity::quantile(double p) const {
  double lo = support_.first, hi = support_.second;
  if (is_piecewise()) {
    const auto& rho = polynomial();
    const double target = p * piece_mass_.back();
    auto it = std::upper_bound(piece_mass_.begin() + 1, piece_mass_.end() - 1, target);
    const std::size_t i = static_cast<std::size_t>(std::distance(piece_mass_.begin(), it)) - 1;
    const auto primitive = rho.piece(i).antiderivative();
    const double local = target - piece_mass_[i];
    double a = 0.0, b = rho.width(i);
    while (b - a > 1e-12) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      (primitive(mid) < local ? a : b) = mid;
    }
    return rho.knots()[i] + 0.5 * (a + b);
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double DisorderDensity::mean() const {
  if (!is_piecewise()) return std::get<RaisedCosine>(shape_).center;
  const auto& rho = polynomial();
  double m = 0;
  for (std::size_t i = 0; i < rho.piece_count(); ++i) {
    const auto& c = rho.piece(i).coefficients();
    Polynomial<double>::Coefficients shifted = Polynomial<double>::Coefficients::Zero(c.size() + 1);
    shifted.tail(c.size()) = c;  // s * p(s)
    const double w = rho.width(i);
    m += rho.knots()[i] * (piece_mass_[i + 1] - piece_mass_[i]) + Polynomial<double>(shifted).antiderivative()(w);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Assumption certificate

AssumptionReport check_assumption(const SingleSitePotential& u, const DisorderDensity& density, int grid_resolution) {
  const int floor = 2 * (2 * u.support_radius() + 1);
  if (grid_resolution < floor) {
    std::ostringstream msg;
    msg << "check_assumption: grid resolution " << grid_resolution << " is below the Nyquist floor " << floor;
    throw std::invalid_argument(msg.str());
  }
  const int d = u.dim();
  long points = 1;
  for (int i = 0; i < d; ++i) points *= grid_resolution;

  AssumptionReport r;
  r.grid_resolution = grid_resolution;
  r.fourier_min_modulus = std::numeric_limits<double>::infinity();
  const double step = 2.0 * std::numbers::pi / grid_resolution;
  Eigen::VectorXd theta(d);
  for (long p = 0; p < points; ++p) {
    long rest = p;
    for (int i = d - 1; i >= 0; --i) {
      theta(i) = step * static_cast<double>(rest % grid_resolution);
      rest /= grid_resolution;
    }
    const double m = std::abs(fourier_u(u, theta));
    if (m < r.fourier_min_modulus) {
      r.fourier_min_modulus = m;
      r.argmin = theta;
    }
  }
  r.lipschitz_slack = u.l1_norm() * u.support_radius() * d * (std::numbers::pi / grid_resolution);
  for (const auto& t : u.terms())
    if (2.0 * std::abs(t.value) > u.l1_norm()) r.dominance_holds = true;
  r.density_in_w21 = density.is_piecewise() ? validate_density(density.polynomial()).ok : true;

  const bool grid_certificate = r.fourier_min_modulus - r.lipschitz_slack > 0;
  r.satisfied = r.density_in_w21 && (r.dominance_holds || grid_certificate);
  std::ostringstream msg;
  if (r.dominance_holds) {
    msg << "certified by diagonal dominance";
  } else if (grid_certificate) {
    msg << "certified on the grid: min |u^| " << r.fourier_min_modulus << " exceeds Lipschitz slack "
        << r.lipschitz_slack;
  } else {
    msg << "not certified: min |u^| = " << r.fourier_min_modulus << " at theta = (" << r.argmin.transpose()
        << ") with Lipschitz slack " << r.lipschitz_slack;
    if (std::abs(u.mean_value()) == 0.0) msg << "; the mean value sum_k u(k) vanishes";
  }
  if (!r.density_in_w21) msg << "; density is not in W^{2,1}";
  r.diagnostic = msg.str();
  return r;
}

AssumptionReport certify_assumption(const SingleSitePotential& u, const DisorderDensity& density, long max_points) {
  int n = std::max(8, 2 * (2 * u.support_radius() + 1));
  n += n % 2;
  auto report = check_assumption(u, density, n);
  auto grid_points = [&](long side) {
    long p = 1;
    for (int i = 0; i < u.dim(); ++i) p *= side;
    return p;
  };
  while (!report.satisfied && report.density_in_w21 && report.fourier_min_modulus > 1e-12 &&
         grid_points(2L * n) <= max_points) {
    n *= 2;
    report = check_assumption(u, density, n);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Couplings

double CouplingConfiguration::at(const Site& k) const {
  const auto i = domain.index_of(k);
  if (!i) throw std::out_of_range("CouplingConfiguration: site outside the coupling domain");
  return values(*i);
}

CouplingConfiguration sample_couplings(const DisorderDensity& density, const Box& box, RandomStream& stream) {
  CouplingConfiguration c{box, Eigen::VectorXd(box.size()), stream.seed(), stream.stream_id()};
  for (Eigen::Index i = 0; i < box.size(); ++i) c.values(i) = density.quantile(stream.uniform());
  return c;
}

// ---------------------------------------------------------------------------
// Sobolev constant

SobolevRatio sobolev_ratio(const TestFunction2D& f) {
  if (f.factors.size() != 2)
    throw std::invalid_argument("sobolev_ratio: only tensor products g (x) h of two factors are supported");
  SobolevRatio r{1.0, 1.0, 0.0};
  for (const auto& g : f.factors) {
    const double sup = g.sup_abs();
    if (g.continuity_defect() > 1e-12 * std::max(1.0, sup))
      throw std::invalid_argument("sobolev_ratio: factor is not absolutely continuous with compact support");
    r.sup_norm *= sup;
    r.mixed_norm *= g.derivative_l1();
  }
  if (r.mixed_norm == 0) throw std::invalid_argument("sobolev_ratio: zero test function");
  r.ratio = r.sup_norm / r.mixed_norm;
  return r;
}

}  // namespace alloy
