#include "alloy/transform.hpp"

#include "alloy/errors.hpp"
#include "alloy/operator.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace alloy {

namespace {

using Complex = std::complex<double>;

long ipow(long base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Row-major multi-index of a flat grid index, each component in [0, side).
void unflatten(long p, long side, Eigen::VectorXi& out) {
  for (Eigen::Index i = out.size() - 1; i >= 0; --i) {
    out(i) = static_cast<int>(p % side);
    p /= side;
  }
}

// In-place d-dimensional forward DFT on a row-major N^d grid.
void fft_nd(std::vector<Complex>& data, long side, int dim) {
  Eigen::FFT<double> fft;
  std::vector<Complex> line(side), out(side);
  for (int axis = 0; axis < dim; ++axis) {
    const long stride = ipow(side, dim - 1 - axis);
    const long lines = static_cast<long>(data.size()) / side;
    for (long l = 0; l < lines; ++l) {
      const long outer = l / stride, inner = l % stride;
      const long base = outer * stride * side + inner;
      for (long k = 0; k < side; ++k) line[k] = data[base + k * stride];
      fft.fwd(out, line);
      for (long k = 0; k < side; ++k) data[base + k * stride] = out[k];
    }
  }
}

}  // namespace

CirculantTransform build_circulant(const SingleSitePotential& u, const Box& lambda_box) {
  CirculantTransform t{lambda_box, envelope_box(lambda_box, u, u.support_radius()), {}, {}};
  const Eigen::Index n = t.envelope.size();
  if (n > kMaxDenseDimension) {
    std::ostringstream msg;
    msg << "build_circulant: |Lambda^+| = " << n << " exceeds the dense limit " << kMaxDenseDimension;
    throw std::length_error(msg.str());
  }

  // The eigenvalues of a d-dimensional circulant are u^ on the torus frequencies.
  const long side = t.envelope.side();
  Eigen::VectorXi m(u.dim());
  t.min_discrete_symbol = std::numeric_limits<double>::infinity();
  Eigen::VectorXi worst = Eigen::VectorXi::Zero(u.dim());
  for (long p = 0; p < ipow(side, u.dim()); ++p) {
    unflatten(p, side, m);
    const Eigen::VectorXd theta = m.cast<double>() * (2.0 * std::numbers::pi / static_cast<double>(side));
    const double modulus = std::abs(fourier_u(u, theta));
    if (modulus < t.min_discrete_symbol) {
      t.min_discrete_symbol = modulus;
      worst = m;
    }
  }
  if (t.min_discrete_symbol <= 1e-12 * u.l1_norm()) {
    std::ostringstream msg;
    msg << "assumption violated at this volume: u^ vanishes at the discrete frequency 2 pi ("
        << worst.transpose() << ") / " << side;
    throw AssumptionViolated(msg.str());
  }

  t.A = periodized_convolution<double>(u, t.envelope);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(t.A);
  t.B = lu.inverse();
  t.inverse_residual = inf_operator_norm(Eigen::MatrixXd(t.A * t.B - Eigen::MatrixXd::Identity(n, n)));
  if (!(t.inverse_residual <= 1e-10)) {
    std::ostringstream msg;
    msg << "build_circulant: ||A B - I||_inf = " << t.inverse_residual << " exceeds 1e-10";
    throw std::runtime_error(msg.str());
  }
  t.b_one_norm = one_norm(t.B);
  t.condition_number = one_norm(t.A) * t.b_one_norm;

  // A(i, j) = u(i - j) for i in Lambda, j in Lambda^+.
  for (Eigen::Index i = 0; i < n; ++i) {
    const Site si = t.envelope.site(i);
    if (!lambda_box.contains(si)) continue;
    for (Eigen::Index j = 0; j < n; ++j)
      if (t.A(i, j) != u(si - t.envelope.site(j)))
        throw std::logic_error("build_circulant: interior rows do not reproduce u(i - j)");
  }
  return t;
}

CuBound infinite_cu(const SingleSitePotential& u, double precision) {
  if (!(precision > 0)) throw std::invalid_argument("infinite_cu: precision must be positive");
  CuBound r;
  if (u.terms().size() == 1) {
    r.exact = true;
    r.upper_bound = r.lattice_sum = 1.0 / std::abs(u.terms().front().value);
    r.min_modulus = std::abs(u.terms().front().value);
    return r;
  }

  const int d = u.dim();
  const long max_points = 1L << 22;
  long side = 32;
  while (side < 8 * (2 * u.support_radius() + 1)) side *= 2;

  for (; ipow(side, d) <= max_points; side *= 2) {
    const long points = ipow(side, d);
    std::vector<Complex> grid(static_cast<std::size_t>(points));
    Eigen::VectorXi m(d);
    r.min_modulus = std::numeric_limits<double>::infinity();
    for (long p = 0; p < points; ++p) {
      unflatten(p, side, m);
      const Eigen::VectorXd theta = m.cast<double>() * (2.0 * std::numbers::pi / static_cast<double>(side));
      const Complex symbol = fourier_u(u, theta);
      r.min_modulus = std::min(r.min_modulus, std::abs(symbol));
      grid[p] = 1.0 / symbol;
    }
    if (r.min_modulus <= 1e-12 * u.l1_norm()) {
      std::ostringstream msg;
      msg << "infinite_cu: u^ vanishes on the grid (min |u^| = " << r.min_modulus << ")";
      throw AssumptionViolated(msg.str());
    }
    fft_nd(grid, side, d);

    // Shell maxima over |k|_inf = r with k taken in [-N/2, N/2).
    const long half = side / 2;
    std::vector<double> shell_max(static_cast<std::size_t>(half + 1), 0.0);
    std::vector<double> magnitudes(static_cast<std::size_t>(points));
    for (long p = 0; p < points; ++p) {
      unflatten(p, side, m);
      int radius = 0;
      for (int i = 0; i < d; ++i) radius = std::max(radius, std::abs(m(i) < half ? m(i) : m(i) - static_cast<int>(side)));
      const double a = std::abs(grid[p]) / static_cast<double>(points);
      magnitudes[p] = a;
      shell_max[radius] = std::max(shell_max[radius], a);
    }
    std::sort(magnitudes.begin(), magnitudes.end());
    r.lattice_sum = 0;
    for (double a : magnitudes) r.lattice_sum += a;  // ascending order keeps the small terms

    const double peak = *std::max_element(shell_max.begin(), shell_max.end());
    const double noise = 1e-12 * peak;
    long r_hi = 0;
    for (long s = 1; s <= half / 2; ++s)
      if (shell_max[s] > noise) r_hi = s;
    double q = 0, amplitude = 0;
    if (r_hi > 0) {
      const long r_lo = std::max(1L, r_hi / 2);
      q = r_hi > r_lo ? std::pow(shell_max[r_hi] / shell_max[r_lo], 1.0 / static_cast<double>(r_hi - r_lo))
                      : shell_max[r_hi] / std::max(shell_max[0], shell_max[r_hi]);
      // Use the slowest decay seen on the fitted range.
      for (long s = r_lo; s < r_hi; ++s)
        if (shell_max[s] > 0) q = std::max(q, shell_max[s + 1] / shell_max[s]);
      amplitude = shell_max[r_hi] / std::pow(q, static_cast<double>(r_hi));
    }
    r.decay_ratio = q;
    r.resolution = static_cast<int>(side);
    if (q >= 0.98) continue;

    double tail = 0;
    if (q > 0) {
      for (long s = half;; ++s) {
        const double shell_size = static_cast<double>(ipow(2 * s + 1, d) - ipow(2 * s - 1, d));
        const double term = shell_size * amplitude * std::pow(q, static_cast<double>(s));
        tail += term;
        if (term < 1e-6 * tail || term < 1e-300) break;
      }
    }
    r.tail_bound = tail;
    if (2.0 * tail <= precision) {
      r.upper_bound = r.lattice_sum + 2.0 * tail;
      return r;
    }
  }
  std::ostringstream msg;
  msg << "infinite_cu: no convergence up to resolution " << r.resolution << " (smallest |u^| observed "
      << r.min_modulus << ", decay ratio " << r.decay_ratio << ")";
  throw std::runtime_error(msg.str());
}

Eigen::VectorXd transform_couplings(const CirculantTransform& t, const CouplingConfiguration& couplings) {
  if (!(couplings.domain == t.envelope))
    throw std::invalid_argument("transform_couplings: couplings must live on Lambda^+");
  return t.A * couplings.values;
}

double minami_constant(double cu, const DisorderDensity& density) {
  const auto& n = density.norms();
  return 0.25 * cu * cu * std::max(n.d1 * n.d1, n.d2);
}

MinamiConstants minami_constants(const CirculantTransform& t, const DisorderDensity& density, double lambda,
                                 const Site& x, const Site& y) {
  if (!(lambda > 0)) throw std::invalid_argument("minami_constants: lambda must be positive");
  if (!t.interior.contains(x) || !t.interior.contains(y))
    throw std::invalid_argument("minami_constants: x and y must lie in Lambda");
  if (x == y) throw std::invalid_argument("minami_constants: x and y must differ");

  MinamiConstants c;
  c.rho_d1 = density.norms().d1;
  c.rho_d2 = density.norms().d2;
  c.cu = t.b_one_norm;
  c.lambda = lambda;
  c.c_min = minami_constant(c.cu, density);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  c.theorem_bound = pi2 / (lambda * lambda) * c.c_min;

  const Eigen::Index ix = *t.envelope.index_of(x), iy = *t.envelope.index_of(y);
  const Eigen::VectorXd bx = t.B.col(ix).cwiseAbs(), by = t.B.col(iy).cwiseAbs();
  const double column_x = bx.sum();
  double sum = 0;
  for (Eigen::Index j = 0; j < bx.size(); ++j)
    sum += by(j) * (c.rho_d2 * bx(j) + c.rho_d1 * c.rho_d1 * (column_x - bx(j)));
  c.sharp_bound = pi2 / (4.0 * lambda * lambda) * sum;
  if (c.sharp_bound > c.theorem_bound * (1.0 + 1e-12))
    throw std::logic_error("minami_constants: site-resolved bound exceeds the theorem bound");
  return c;
}

}  // namespace alloy
