#include "alloy/operator.hpp"

#include "alloy/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace alloy {

namespace {

using Complex = std::complex<double>;

Eigen::Index site_index(const Box& box, const Site& x, const char* what) {
  const auto i = box.index_of(x);
  if (!i) {
    std::ostringstream msg;
    msg << what << ": site (" << x.transpose() << ") is outside the box";
    throw std::invalid_argument(msg.str());
  }
  return *i;
}

void require_dense_size(Eigen::Index n, const char* what) {
  if (n > kMaxDenseDimension) {
    std::ostringstream msg;
    msg << what << ": dimension " << n << " exceeds the dense limit " << kMaxDenseDimension;
    throw std::length_error(msg.str());
  }
}

Eigen::MatrixXcd shifted_dense(const Eigen::MatrixXd& h, Complex z) {
  Eigen::MatrixXcd a = h.cast<Complex>();
  a.diagonal().array() -= z;
  return a;
}

// Solves (H - z) W = [delta_x, delta_y] and checks the residual.
Eigen::MatrixX2cd solve_two_columns(const Eigen::MatrixXd& h, double norm_bound, Complex z, Eigen::Index ix,
                                    Eigen::Index iy) {
  if (!(z.imag() > 1e-14)) throw SolverFailure("resolvent: Im z is within 1e-14 of the real axis");
  const Eigen::MatrixXcd a = shifted_dense(h, z);
  Eigen::MatrixX2cd rhs = Eigen::MatrixX2cd::Zero(h.rows(), 2);
  rhs(ix, 0) = 1.0;
  rhs(iy, 1) = 1.0;
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const Eigen::MatrixX2cd w = lu.solve(rhs);
  if (!w.allFinite()) throw SolverFailure("resolvent: non-finite solution");
  const double residual = (a * w - rhs).colwise().norm().maxCoeff();
  if (residual > 1e-10 * (1.0 + norm_bound)) {
    std::ostringstream msg;
    msg << "resolvent: residual " << residual << " above tolerance";
    throw SolverFailure(msg.str());
  }
  return w;
}

Eigen::Matrix2cd block_of(const Eigen::MatrixX2cd& w, Eigen::Index ix, Eigen::Index iy) {
  Eigen::Matrix2cd g;
  g << w(ix, 0), w(ix, 1), w(iy, 0), w(iy, 1);
  return g;
}

}  // namespace

Eigen::VectorXd HamiltonianSample::diagonal() const {
  return (lambda_ * potential_.array() + diagonal_shift_).matrix();
}

double HamiltonianSample::norm_bound() const {
  return diagonal().cwiseAbs().maxCoeff() + 2.0 * box_.dim();
}

HamiltonianSample build_hamiltonian(const Box& box, const SingleSitePotential& u, CouplingConfiguration couplings,
                                    double lambda, Laplacian laplacian) {
  if (box.dim() != u.dim()) throw std::invalid_argument("build_hamiltonian: box and potential dimensions differ");
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw std::invalid_argument("build_hamiltonian: lambda must be >= 0");
  if (!couplings.domain.contains(Box(box.center(), box.radius() + u.support_radius())))
    throw std::invalid_argument("build_hamiltonian: coupling domain mismatch, couplings must cover the envelope box");
  if (couplings.values.size() != couplings.domain.size())
    throw std::invalid_argument("build_hamiltonian: coupling vector does not match its domain");

  HamiltonianSample h(box, std::move(couplings));
  h.lambda_ = lambda;
  h.diagonal_shift_ = laplacian == Laplacian::shifted ? 2.0 * box.dim() : 0.0;

  const Eigen::Index n = box.size();
  const auto& omega = h.couplings_;
  h.potential_ = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n * (1 + 2 * box.dim())));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Site x = box.site(i);
    double v = 0;
    for (const auto& t : u.terms()) v += omega.values(*omega.domain.index_of(x - t.offset)) * t.value;
    h.potential_(i) = v;
    const double diag = h.diagonal_shift_ + lambda * v;
    if (diag != 0.0) triplets.emplace_back(i, i, diag);
    for (int axis = 0; axis < box.dim(); ++axis) {
      const auto j = box.index_of(x + unit_vector(box.dim(), axis));
      if (!j) continue;
      triplets.emplace_back(i, *j, -1.0);
      triplets.emplace_back(*j, i, -1.0);
    }
  }
  h.matrix_.resize(n, n);
  h.matrix_.setFromTriplets(triplets.begin(), triplets.end());
  return h;
}

GreenBlock green_block(const HamiltonianSample& h, std::complex<double> z, const Site& x, const Site& y) {
  const Eigen::Index ix = site_index(h.box(), x, "green_block");
  const Eigen::Index iy = site_index(h.box(), y, "green_block");
  if (ix == iy) throw std::invalid_argument("green_block: x and y must differ");
  require_dense_size(h.dimension(), "green_block");
  const auto w = solve_two_columns(h.dense(), h.norm_bound(), z, ix, iy);
  return GreenBlock{block_of(w, ix, iy), z, x, y};
}

Eigen::MatrixXcd green_matrix(const HamiltonianSample& h, std::complex<double> z) {
  require_dense_size(h.dimension(), "green_matrix");
  if (!(z.imag() > 1e-14)) throw SolverFailure("green_matrix: Im z is within 1e-14 of the real axis");
  const Eigen::MatrixXcd a = shifted_dense(h.dense(), z);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  Eigen::MatrixXcd g = lu.inverse();
  if (!g.allFinite()) throw SolverFailure("green_matrix: non-finite inverse");
  return g;
}

Eigen::Matrix2cd KreinDecomposition::green(double lambda, double v_x, double v_y) const {
  Eigen::Matrix2cd d = -M;
  d(0, 0) += v_x;
  d(1, 1) += v_y;
  return d.inverse() / lambda;
}

KreinDecomposition krein_decomposition(const HamiltonianSample& h, std::complex<double> z, const Site& x,
                                       const Site& y) {
  if (!(h.lambda() > 0)) throw std::invalid_argument("krein_decomposition: lambda must be positive");
  const Eigen::Index ix = site_index(h.box(), x, "krein_decomposition");
  const Eigen::Index iy = site_index(h.box(), y, "krein_decomposition");
  if (ix == iy) throw std::invalid_argument("krein_decomposition: x and y must differ");
  require_dense_size(h.dimension(), "krein_decomposition");

  Eigen::MatrixXd hat = h.dense();
  hat(ix, ix) -= h.lambda() * h.potential()(ix);
  hat(iy, iy) -= h.lambda() * h.potential()(iy);
  const auto w = solve_two_columns(hat, h.norm_bound(), z, ix, iy);

  KreinDecomposition k;
  k.hat_green_block = block_of(w, ix, iy);
  const Eigen::JacobiSVD<Eigen::Matrix2cd> svd(k.hat_green_block);
  const auto s = svd.singularValues();
  k.hat_block_condition = s(1) > 0 ? s(0) / s(1) : std::numeric_limits<double>::infinity();
  if (k.hat_block_condition > 1e12) throw SolverFailure("krein_decomposition: near-singular hat Green block");
  k.M = -k.hat_green_block.inverse() / h.lambda();
  k.im_m_min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(imaginary_part(k.M)).eigenvalues()(0);
  if (!(k.im_m_min_eigenvalue > 0)) throw NumericalFault("krein_decomposition: Im M is not positive definite");
  return k;
}

Eigen::VectorXd eigenvalues(const HamiltonianSample& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  if (h.box().dim() == 1) {
    const Eigen::VectorXd sub = Eigen::VectorXd::Constant(std::max<Eigen::Index>(h.dimension() - 1, 0), -1.0);
    solver.computeFromTridiagonal(h.diagonal(), sub, Eigen::EigenvaluesOnly);
  } else {
    require_dense_size(h.dimension(), "eigenvalues");
    solver.compute(h.dense(), Eigen::EigenvaluesOnly);
  }
  if (solver.info() != Eigen::Success) throw SolverFailure("eigenvalues: symmetric eigensolver did not converge");
  return solver.eigenvalues();
}

Eigen::Index count_in_interval(const Eigen::Ref<const Eigen::VectorXd>& sorted, double a, double b) {
  if (a > b) return 0;
  const double* first = sorted.data();
  const double* last = first + sorted.size();
  return std::upper_bound(first, last, b) - std::lower_bound(first, last, a);
}

Eigen::Index count_in_interval(const HamiltonianSample& h, double a, double b) {
  const Eigen::VectorXd e = eigenvalues(h);
  return count_in_interval(e, a, b);
}

}  // namespace alloy
