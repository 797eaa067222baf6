#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "lqp/core/error.hpp"

namespace lqp {

/// Uniform sampling of one coordinate. Closed axes carry nodes at both ends;
/// periodic axes sample [lo, hi) and wrap.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t count = 3;
  bool periodic = false;

  double length() const { return hi - lo; }
  double spacing() const {
    return periodic ? length() / static_cast<double>(count)
                    : length() / static_cast<double>(count - 1);
  }
  double coordinate(std::size_t i) const { return lo + static_cast<double>(i) * spacing(); }

  /// Trapezoid weights (uniform on periodic axes).
  std::vector<double> weights() const {
    std::vector<double> w(count, spacing());
    if (!periodic) {
      w.front() *= 0.5;
      w.back() *= 0.5;
    }
    return w;
  }
};

/// Tensor-product grid, row-major (last axis fastest).
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
    for (const auto& ax : axes_) {
      if (!(ax.hi > ax.lo) || !std::isfinite(ax.lo) || !std::isfinite(ax.hi))
        throw DomainError("axis interval must be finite with positive length");
      if (ax.count < 2) throw DomainError("axis needs at least 2 nodes");
    }
    strides_.assign(axes_.size(), 1);
    for (int a = static_cast<int>(axes_.size()) - 2; a >= 0; --a)
      strides_[static_cast<std::size_t>(a)] =
          strides_[static_cast<std::size_t>(a) + 1] * axes_[static_cast<std::size_t>(a) + 1].count;
    size_ = axes_.empty() ? 0 : strides_[0] * axes_[0].count;
  }

  int dim() const { return static_cast<int>(axes_.size()); }
  std::size_t size() const { return size_; }
  const Axis& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
  const std::vector<Axis>& axes() const { return axes_; }
  std::size_t stride(int a) const { return strides_[static_cast<std::size_t>(a)]; }
  std::size_t count(int a) const { return axis(a).count; }

  std::size_t index_along(std::size_t flat, int a) const { return (flat / stride(a)) % count(a); }

  double coordinate(std::size_t flat, int a) const { return axis(a).coordinate(index_along(flat, a)); }

  void point(std::size_t flat, std::span<double> out) const {
    for (int a = 0; a < dim(); ++a) out[static_cast<std::size_t>(a)] = coordinate(flat, a);
  }
  std::vector<double> point(std::size_t flat) const {
    std::vector<double> p(axes_.size());
    point(flat, p);
    return p;
  }

  /// Full coordinate field of one axis, one value per node.
  std::vector<double> coordinate_field(int a) const {
    std::vector<double> out(size_);
    for (std::size_t i = 0; i < size_; ++i) out[i] = coordinate(i, a);
    return out;
  }

  /// Tensor trapezoid weights, one per node.
  std::vector<double> quadrature_weights() const {
    std::vector<double> w(size_, 1.0);
    for (int a = 0; a < dim(); ++a) {
      const auto wa = axis(a).weights();
      for (std::size_t i = 0; i < size_; ++i) w[i] *= wa[index_along(i, a)];
    }
    return w;
  }

  double volume() const {
    double v = 1.0;
    for (const auto& ax : axes_) v *= ax.length();
    return v;
  }

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

}  // namespace lqp
