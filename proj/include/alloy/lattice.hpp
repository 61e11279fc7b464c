#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace alloy {

/// A point of Z^d. The dimension is the vector length.
using Site = Eigen::VectorXi;

inline int inf_norm(const Site& x) { return x.size() == 0 ? 0 : x.cwiseAbs().maxCoeff(); }

Site origin(int dim);
Site unit_vector(int dim, int axis, int length = 1);

/// Cube {y in Z^d : |y - center|_inf <= radius} with a fixed lexicographic
/// enumeration, first coordinate most significant.
class Box {
 public:
  Box(Site center, int radius);
  static Box centered(int dim, int radius);

  int dim() const { return static_cast<int>(center_.size()); }
  int radius() const { return radius_; }
  int side() const { return 2 * radius_ + 1; }
  const Site& center() const { return center_; }
  Eigen::Index size() const { return size_; }

  Site site(Eigen::Index index) const;
  std::optional<Eigen::Index> index_of(const Site& x) const;
  bool contains(const Site& x) const { return index_of(x).has_value(); }
  bool contains(const Box& other) const;

  bool operator==(const Box& other) const {
    return radius_ == other.radius_ && center_ == other.center_;
  }

 private:
  Site center_;
  int radius_;
  Eigen::Index size_;
};

std::vector<Site> enumerate_box(const Box& box);

/// Lambda^+ = Lambda_{l+R} for an origin-centred Lambda = Lambda_l: every site
/// whose coupling constant reaches Lambda through a potential of support radius R.
Box envelope_box(const Box& lambda_box, int support_radius);

/// pi_L: the unique representative of x modulo (2L+1)Z^d inside Lambda_{L,0}.
Site periodize(const Site& x, int radius);

}  // namespace alloy
