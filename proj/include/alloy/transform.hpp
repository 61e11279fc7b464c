#pragma once

#include "alloy/disorder.hpp"
#include "alloy/lattice.hpp"

#include <Eigen/Core>

namespace alloy {

/// Induced l1 -> l1 operator norm: largest absolute column sum.
template <typename Derived>
typename Derived::RealScalar one_norm(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

/// Induced l_inf operator norm: largest absolute row sum.
template <typename Derived>
typename Derived::RealScalar inf_operator_norm(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

/// A(i, j) = u(pi_L(i - j)) over the enumeration of `envelope` = Lambda_L.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> periodized_convolution(const SingleSitePotential& u,
                                                                              const Box& envelope) {
  const Eigen::Index n = envelope.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Site si = envelope.site(i);
    for (const auto& t : u.terms()) {
      // pi_L(s_i - s_j) = offset  <=>  s_j = pi_L(s_i - offset)
      const Site sj = periodize(si - t.offset, envelope.radius());
      a(i, *envelope.index_of(sj)) += static_cast<Scalar>(t.value);
    }
  }
  return a;
}

struct CirculantTransform {
  Box interior;  // Lambda
  Box envelope;  // Lambda^+
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;  // A^{-1}
  double b_one_norm = 0;
  double condition_number = 0;  // ||A||_1 ||B||_1
  double inverse_residual = 0;  // ||A B - I||_inf
  double min_discrete_symbol = 0;  // min |u^| over the torus frequencies of Lambda^+
};

/// Builds and inverts the circulant transform over Lambda^+ = envelope of the
/// origin-centred box. Throws AssumptionViolated when u^ vanishes on the
/// discrete frequency grid of Lambda^+.
CirculantTransform build_circulant(const SingleSitePotential& u, const Box& lambda_box);

struct CuBound {
  double upper_bound = 0;  // certified C_u upper bound
  double lattice_sum = 0;  // sum |v~(k)| of the periodised inverse coefficients
  double tail_bound = 0;   // geometric-fit bound on the l1 tail beyond the grid
  double decay_ratio = 0;  // fitted |v(k)| ~ C q^|k|_inf
  int resolution = 0;      // grid points per dimension
  double min_modulus = 0;  // smallest |u^| seen on the final grid
  bool exact = false;      // closed form (single-site support)
};

/// C_u = ||A^{-1}||_1 for the convolution operator on Z^d, i.e. the l1 norm of
/// the Fourier coefficients of 1/u^. Grids are refined until the tail bound
/// is below `precision`.
CuBound infinite_cu(const SingleSitePotential& u, double precision = 1e-10);

/// zeta = A omega over Lambda^+.
Eigen::VectorXd transform_couplings(const CirculantTransform& t, const CouplingConfiguration& couplings);

struct MinamiConstants {
  double c_min = 0;           // (||B||_1^2 / 4) max{||rho'||_1^2, ||rho''||_1}
  double theorem_bound = 0;   // (pi / lambda)^2 c_min
  double sharp_bound = 0;     // site-resolved bound at (x, y)
  double rho_d1 = 0;
  double rho_d2 = 0;
  double cu = 0;              // the C_u value used (||B||_1)
  double lambda = 0;
};

/// Theorem-level and site-resolved Minami bounds for the pair (x, y) of the
/// interior box, with C_u replaced by the certified ||B||_1.
MinamiConstants minami_constants(const CirculantTransform& t, const DisorderDensity& density, double lambda,
                                 const Site& x, const Site& y);

/// (C_u^2 / 4) max{||rho'||_1^2, ||rho''||_1} for an externally supplied C_u.
double minami_constant(double cu, const DisorderDensity& density);

}  // namespace alloy
