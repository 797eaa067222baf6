#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "lqp/core/error.hpp"
#include "lqp/core/grid.hpp"
#include "lqp/core/stencil.hpp"

namespace lqp {

/// Positive weight on a domain: constant, power law in one coordinate,
/// samples along one axis, or an arbitrary callable.
class WeightProfile {
 public:
  /// scale * (b - x_axis)^(-lambda)
  struct PowerLaw {
    double b = 1.0;
    double lambda = 0.0;
    double scale = 1.0;
    int axis = 0;
  };

  /// The constant weight 1.
  WeightProfile() = default;

  static WeightProfile constant(double c) {
    WeightProfile w;
    w.constant_ = c;
    w.axis_ = -2;
    return w;
  }

  static WeightProfile power_law(double b, double lambda, double scale = 1.0, int axis = 0) {
    WeightProfile w;
    w.power_ = PowerLaw{b, lambda, scale, axis};
    w.axis_ = axis;
    return w;
  }

  /// Depends on coordinate `axis` only when axis >= 0; on the whole point when axis == -1.
  static WeightProfile function(std::function<double(std::span<const double>)> f, int axis = -1) {
    WeightProfile w;
    w.fn_ = std::move(f);
    w.axis_ = axis;
    return w;
  }

  /// Samples along one axis, linearly interpolated.
  static WeightProfile sampled_axis(Axis ax, std::vector<double> values, int axis = 0) {
    if (values.size() != ax.count) throw DomainError("weight samples do not match axis");
    WeightProfile w;
    w.samples_axis_ = ax;
    w.samples_ = std::move(values);
    w.axis_ = axis;
    return w;
  }

  double operator()(std::span<const double> x) const {
    if (power_) {
      const double d = power_->b - x[static_cast<std::size_t>(power_->axis)];
      return power_->scale * std::pow(d, -power_->lambda);
    }
    if (fn_) return fn_(x);
    if (!samples_.empty()) {
      const Stencil s = interpolation_stencil(samples_axis_, x[static_cast<std::size_t>(axis_)], 2);
      double v = 0.0;
      for (std::size_t j = 0; j < s.w.size(); ++j) v += s.w[j] * samples_[static_cast<std::size_t>(s.start) + j];
      return v;
    }
    return constant_;
  }

  /// Value as a function of the single coordinate it depends on (t-only profiles).
  double at(double coordinate, int dim) const {
    std::vector<double> p(static_cast<std::size_t>(dim), 0.0);
    const int a = axis_ >= 0 ? axis_ : 0;
    p[static_cast<std::size_t>(a)] = coordinate;
    return (*this)(p);
  }

  std::vector<double> sample(const Grid& g) const {
    std::vector<double> out(g.size());
    if (is_constant()) {
      std::fill(out.begin(), out.end(), constant_);
      return out;
    }
    std::vector<double> p(static_cast<std::size_t>(g.dim()));
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.point(i, p);
      out[i] = (*this)(p);
    }
    return out;
  }

  bool is_constant() const { return axis_ == -2; }
  double constant_value() const { return constant_; }
  /// Axis the profile depends on: >= 0 single axis, -1 general, -2 constant.
  int axis() const { return axis_; }
  bool single_axis() const { return axis_ >= 0 || axis_ == -2; }
  const std::optional<PowerLaw>& power() const { return power_; }

 private:
  double constant_ = 1.0;
  std::optional<PowerLaw> power_;
  std::function<double(std::span<const double>)> fn_;
  Axis samples_axis_;
  std::vector<double> samples_;
  int axis_ = -2;
};

}  // namespace lqp
