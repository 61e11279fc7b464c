#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace alloy {

/// Dense power-basis polynomial c0 + c1 t + ... + cn t^n.
template <typename Scalar = double>
class Polynomial {
 public:
  using Coefficients = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Polynomial() : coeffs_(Coefficients::Zero(1)) {}
  explicit Polynomial(Coefficients c) : coeffs_(std::move(c)) {
    if (coeffs_.size() == 0) coeffs_ = Coefficients::Zero(1);
    trim();
  }
  Polynomial(std::initializer_list<Scalar> c) : Polynomial(from_list(c)) {}

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return degree() == 0 && coeffs_(0) == Scalar(0); }
  const Coefficients& coefficients() const { return coeffs_; }

  Scalar operator()(Scalar t) const {
    Scalar acc = coeffs_(degree());
    for (int k = degree() - 1; k >= 0; --k) acc = acc * t + coeffs_(k);
    return acc;
  }

  Polynomial derivative() const {
    if (degree() == 0) return Polynomial();
    Coefficients d(degree());
    for (int k = 1; k <= degree(); ++k) d(k - 1) = Scalar(k) * coeffs_(k);
    return Polynomial(d);
  }

  /// Antiderivative vanishing at t = 0.
  Polynomial antiderivative() const {
    Coefficients a = Coefficients::Zero(coeffs_.size() + 1);
    for (int k = 0; k <= degree(); ++k) a(k + 1) = coeffs_(k) / Scalar(k + 1);
    return Polynomial(a);
  }

  Polynomial operator*(Scalar s) const { return Polynomial(Coefficients(coeffs_ * s)); }

  /// p(t) -> p(scale * t + shift), used to move a profile onto another interval.
  Polynomial composed_affine(Scalar scale, Scalar shift) const {
    // Horner in the polynomial ring: acc = acc * (scale t + shift) + c_k.
    Coefficients acc = Coefficients::Zero(coeffs_.size());
    acc(0) = coeffs_(degree());
    int acc_degree = 0;
    for (int k = degree() - 1; k >= 0; --k) {
      Coefficients next = Coefficients::Zero(coeffs_.size());
      for (int j = 0; j <= acc_degree; ++j) {
        next(j) += acc(j) * shift;
        next(j + 1) += acc(j) * scale;
      }
      next(0) += coeffs_(k);
      acc = next;
      ++acc_degree;
    }
    return Polynomial(acc);
  }

 private:
  static Coefficients from_list(std::initializer_list<Scalar> c) {
    Coefficients v(static_cast<Eigen::Index>(c.size()));
    Eigen::Index i = 0;
    for (Scalar x : c) v(i++) = x;
    return v;
  }
  void trim() {
    Eigen::Index n = coeffs_.size();
    while (n > 1 && coeffs_(n - 1) == Scalar(0)) --n;
    coeffs_.conservativeResize(n);
  }

  Coefficients coeffs_;
};

namespace detail {

template <typename Scalar>
Scalar bisect_root(const Polynomial<Scalar>& p, Scalar lo, Scalar hi) {
  Scalar flo = p(lo);
  for (int it = 0; it < 200; ++it) {
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    if (mid <= lo || mid >= hi) break;
    const Scalar fmid = p(mid);
    if (fmid == Scalar(0)) return mid;
    if ((fmid < Scalar(0)) == (flo < Scalar(0))) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return lo + (hi - lo) / Scalar(2);
}

}  // namespace detail

/// Real roots of p in the closed interval [lo, hi], ascending. Roots are
/// bracketed between consecutive critical points (roots of p', recursively),
/// on which p is monotone, and refined by bisection to machine precision.
/// Sign-preserving double roots are reported only where p vanishes exactly.
template <typename Scalar>
std::vector<Scalar> real_roots(const Polynomial<Scalar>& p, Scalar lo, Scalar hi) {
  if (p.is_zero()) throw std::invalid_argument("real_roots: zero polynomial");
  std::vector<Scalar> roots;
  if (p.degree() == 0) return roots;
  std::vector<Scalar> knots{lo};
  for (Scalar c : real_roots(p.derivative(), lo, hi))
    if (c > lo && c < hi) knots.push_back(c);
  knots.push_back(hi);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const Scalar a = knots[i], b = knots[i + 1];
    const Scalar fa = p(a), fb = p(b);
    if (fa == Scalar(0)) {
      roots.push_back(a);
    } else if (fb != Scalar(0) && ((fa < Scalar(0)) != (fb < Scalar(0)))) {
      roots.push_back(detail::bisect_root(p, a, b));
    }
  }
  if (p(hi) == Scalar(0)) roots.push_back(hi);
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

/// Interval [lo, hi] split at every interior critical point of p.
template <typename Scalar>
std::vector<Scalar> monotone_partition(const Polynomial<Scalar>& p, Scalar lo, Scalar hi) {
  std::vector<Scalar> knots{lo};
  const auto dp = p.derivative();
  if (!dp.is_zero())
    for (Scalar c : real_roots(dp, lo, hi))
      if (c > lo && c < hi) knots.push_back(c);
  knots.push_back(hi);
  return knots;
}

/// Total variation of p on [lo, hi], i.e. the integral of |p'|.
template <typename Scalar>
Scalar total_variation(const Polynomial<Scalar>& p, Scalar lo, Scalar hi) {
  const auto knots = monotone_partition(p, lo, hi);
  Scalar tv = 0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) tv += std::abs(p(knots[i + 1]) - p(knots[i]));
  return tv;
}

template <typename Scalar>
Scalar max_abs(const Polynomial<Scalar>& p, Scalar lo, Scalar hi) {
  Scalar m = 0;
  for (Scalar t : monotone_partition(p, lo, hi)) m = std::max(m, Scalar(std::abs(p(t))));
  return m;
}

template <typename Scalar>
Scalar min_value(const Polynomial<Scalar>& p, Scalar lo, Scalar hi) {
  Scalar m = p(lo);
  for (Scalar t : monotone_partition(p, lo, hi)) m = std::min(m, p(t));
  return m;
}

/// Piecewise polynomial on [knots.front(), knots.back()], zero outside. Piece i
/// lives on [knots[i], knots[i+1]] and is expressed in the local variable
/// s = t - knots[i].
template <typename Scalar = double>
class PiecewisePolynomial {
 public:
  PiecewisePolynomial() = default;
  PiecewisePolynomial(std::vector<Scalar> knots, std::vector<Polynomial<Scalar>> pieces)
      : knots_(std::move(knots)), pieces_(std::move(pieces)) {
    if (pieces_.empty() || knots_.size() != pieces_.size() + 1)
      throw std::invalid_argument("PiecewisePolynomial: need n pieces and n+1 knots");
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
      if (!(knots_[i] < knots_[i + 1]))
        throw std::invalid_argument("PiecewisePolynomial: knots must be strictly increasing");
  }

  std::size_t piece_count() const { return pieces_.size(); }
  const std::vector<Scalar>& knots() const { return knots_; }
  const Polynomial<Scalar>& piece(std::size_t i) const { return pieces_[i]; }
  Scalar width(std::size_t i) const { return knots_[i + 1] - knots_[i]; }
  Scalar lower() const { return knots_.front(); }
  Scalar upper() const { return knots_.back(); }

  /// Index of the piece containing t, or -1 outside the support.
  std::ptrdiff_t locate(Scalar t) const {
    if (t < lower() || t > upper()) return -1;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    std::ptrdiff_t i = std::distance(knots_.begin(), it) - 1;
    return std::min<std::ptrdiff_t>(i, static_cast<std::ptrdiff_t>(pieces_.size()) - 1);
  }

  Scalar operator()(Scalar t) const {
    const auto i = locate(t);
    return i < 0 ? Scalar(0) : pieces_[i](t - knots_[i]);
  }

  PiecewisePolynomial derivative() const {
    std::vector<Polynomial<Scalar>> d;
    for (const auto& p : pieces_) d.push_back(p.derivative());
    return {knots_, std::move(d)};
  }

  PiecewisePolynomial scaled(Scalar c) const {
    std::vector<Polynomial<Scalar>> s;
    for (const auto& p : pieces_) s.push_back(p * c);
    return {knots_, std::move(s)};
  }

  Scalar integral() const {
    Scalar total = 0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) total += pieces_[i].antiderivative()(width(i));
    return total;
  }

  /// Integral of |f'| over the support, assuming f is continuous.
  Scalar derivative_l1() const {
    Scalar total = 0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) total += total_variation(pieces_[i], Scalar(0), width(i));
    return total;
  }

  Scalar sup_abs() const {
    Scalar m = 0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) m = std::max(m, max_abs(pieces_[i], Scalar(0), width(i)));
    return m;
  }

  Scalar min() const {
    Scalar m = pieces_[0](Scalar(0));
    for (std::size_t i = 0; i < pieces_.size(); ++i) m = std::min(m, min_value(pieces_[i], Scalar(0), width(i)));
    return m;
  }

  /// Largest jump of f at an interior knot or at the two ends (where the
  /// zero extension is compared against).
  Scalar continuity_defect() const {
    Scalar jump = std::max(std::abs(pieces_.front()(Scalar(0))),
                           std::abs(pieces_.back()(width(pieces_.size() - 1))));
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i)
      jump = std::max(jump, Scalar(std::abs(pieces_[i](width(i)) - pieces_[i + 1](Scalar(0)))));
    return jump;
  }

 private:
  std::vector<Scalar> knots_;
  std::vector<Polynomial<Scalar>> pieces_;
};

}  // namespace alloy
