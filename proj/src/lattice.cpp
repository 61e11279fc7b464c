#include "alloy/lattice.hpp"

#include <stdexcept>

namespace alloy {

Site origin(int dim) { return Site::Zero(dim); }

Site unit_vector(int dim, int axis, int length) {
  Site e = Site::Zero(dim);
  e(axis) = length;
  return e;
}

Box::Box(Site center, int radius) : center_(std::move(center)), radius_(radius) {
  if (center_.size() < 1) throw std::invalid_argument("Box: dimension must be >= 1");
  if (radius_ < 0) throw std::invalid_argument("Box: radius must be >= 0");
  size_ = 1;
  for (int i = 0; i < dim(); ++i) size_ *= side();
}

Box Box::centered(int dim, int radius) { return Box(origin(dim), radius); }

Site Box::site(Eigen::Index index) const {
  if (index < 0 || index >= size_) throw std::out_of_range("Box::site: index out of range");
  Site x(dim());
  for (int i = dim() - 1; i >= 0; --i) {
    x(i) = center_(i) - radius_ + static_cast<int>(index % side());
    index /= side();
  }
  return x;
}

std::optional<Eigen::Index> Box::index_of(const Site& x) const {
  if (x.size() != center_.size()) return std::nullopt;
  Eigen::Index index = 0;
  for (int i = 0; i < dim(); ++i) {
    const int offset = x(i) - center_(i) + radius_;
    if (offset < 0 || offset >= side()) return std::nullopt;
    index = index * side() + offset;
  }
  return index;
}

bool Box::contains(const Box& other) const {
  if (other.dim() != dim()) return false;
  return inf_norm(other.center_ - center_) + other.radius_ <= radius_;
}

std::vector<Site> enumerate_box(const Box& box) {
  std::vector<Site> sites;
  sites.reserve(static_cast<std::size_t>(box.size()));
  for (Eigen::Index i = 0; i < box.size(); ++i) sites.push_back(box.site(i));
  return sites;
}

Box envelope_box(const Box& lambda_box, int support_radius) {
  if (support_radius < 0) throw std::invalid_argument("envelope_box: support radius must be >= 0");
  if (inf_norm(lambda_box.center()) != 0)
    throw std::invalid_argument("envelope_box: the interior box must be centred at the origin");
  return Box::centered(lambda_box.dim(), lambda_box.radius() + support_radius);
}

Site periodize(const Site& x, int radius) {
  if (radius < 0) throw std::invalid_argument("periodize: radius must be >= 0");
  const int period = 2 * radius + 1;
  Site y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    int r = ((x(i) % period) + period) % period;
    y(i) = r > radius ? r - period : r;
  }
  return y;
}

}  // namespace alloy
