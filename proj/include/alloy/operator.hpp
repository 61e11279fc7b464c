#pragma once

#include "alloy/disorder.hpp"
#include "alloy/lattice.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <complex>

namespace alloy {

/// -Delta as the negated adjacency operator (free spectrum [-2d, 2d]), or the
/// same shifted by 2d on the diagonal.
enum class Laplacian { adjacency, shifted };

/// Largest dimension handled by dense factorizations.
inline constexpr Eigen::Index kMaxDenseDimension = 4096;

/// H_{omega,Lambda} = -Delta + lambda V_omega restricted to a box, assembled
/// symmetrically in the box enumeration order.
class HamiltonianSample {
 public:
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix_); }
  const Box& box() const { return box_; }
  double lambda() const { return lambda_; }
  const CouplingConfiguration& couplings() const { return couplings_; }
  /// V_omega(k) for k in the box, in enumeration order.
  const Eigen::VectorXd& potential() const { return potential_; }
  double diagonal_shift() const { return diagonal_shift_; }
  Eigen::Index dimension() const { return box_.size(); }

  /// Diagonal entries diagonal_shift + lambda V_omega(k).
  Eigen::VectorXd diagonal() const;
  /// Upper bound on the operator 2-norm (Gershgorin).
  double norm_bound() const;

 private:
  friend HamiltonianSample build_hamiltonian(const Box&, const SingleSitePotential&, CouplingConfiguration,
                                             double, Laplacian);
  HamiltonianSample(Box box, CouplingConfiguration couplings) : box_(std::move(box)), couplings_(std::move(couplings)) {}

  Box box_;
  CouplingConfiguration couplings_;
  Eigen::SparseMatrix<double> matrix_;
  Eigen::VectorXd potential_;
  double lambda_ = 0;
  double diagonal_shift_ = 0;
};

/// Requires the coupling domain to contain every k with u(x - k) != 0 for x in
/// the box. Neighbours outside the box are dropped (plain restriction).
/// lambda = 0 is accepted and gives the free operator.
HamiltonianSample build_hamiltonian(const Box& box, const SingleSitePotential& u, CouplingConfiguration couplings,
                                    double lambda, Laplacian laplacian = Laplacian::adjacency);

/// Im of a 2x2 block in the operator sense, (G - G^*) / 2i, which is real
/// symmetric when G is complex symmetric.
template <typename Derived>
Eigen::Matrix2d imaginary_part(const Eigen::MatrixBase<Derived>& g) {
  const Eigen::Matrix2cd h = (g - g.adjoint()) / std::complex<double>(0.0, 2.0);
  return h.real();
}

/// det of (G - G^*) / 2i for a 2x2 block.
template <typename Derived>
double det_imaginary_part(const Eigen::MatrixBase<Derived>& g) {
  return imaginary_part(g).determinant();
}

/// 2x2 block of (H - z)^{-1} at the sites (x, y).
struct GreenBlock {
  Eigen::Matrix2cd entries;
  std::complex<double> z;
  Site x, y;

  Eigen::Matrix2d imag() const { return imaginary_part(entries); }
  double det_imag() const { return det_imaginary_part(entries); }
};

GreenBlock green_block(const HamiltonianSample& h, std::complex<double> z, const Site& x, const Site& y);

/// Full resolvent (H - z)^{-1}.
Eigen::MatrixXcd green_matrix(const HamiltonianSample& h, std::complex<double> z);

struct KreinDecomposition {
  Eigen::Matrix2cd M;
  Eigen::Matrix2cd hat_green_block;
  double im_m_min_eigenvalue = 0;
  double hat_block_condition = 0;

  /// lambda^{-1} (diag(v_x, v_y) - M)^{-1}.
  Eigen::Matrix2cd green(double lambda, double v_x, double v_y) const;
};

/// M = -lambda^{-1} (G^ block)^{-1} where G^ is the resolvent of H with the
/// potential entries lambda V(x), lambda V(y) removed.
KreinDecomposition krein_decomposition(const HamiltonianSample& h, std::complex<double> z, const Site& x,
                                       const Site& y);

/// All eigenvalues, ascending with multiplicity. One-dimensional chains use
/// the tridiagonal solver directly.
Eigen::VectorXd eigenvalues(const HamiltonianSample& h);

/// Number of entries of an ascending list inside the closed interval [a, b].
Eigen::Index count_in_interval(const Eigen::Ref<const Eigen::VectorXd>& sorted, double a, double b);
Eigen::Index count_in_interval(const HamiltonianSample& h, double a, double b);

}  // namespace alloy
