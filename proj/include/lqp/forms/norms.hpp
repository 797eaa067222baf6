#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "lqp/forms/grid_form.hpp"
#include "lqp/forms/weight.hpp"

namespace lqp {

enum class Metric {
  euclidean,
  /// dt^2 + h^2 g_N with h taken from the domain's warp samples
  twisted,
};

inline Metric natural_metric(const DomainSpec& d) {
  return d.kind() == DomainKind::twisted_cylinder ? Metric::twisted : Metric::euclidean;
}

/// Pointwise norm field. In the twisted metric, w = w_A + dt ^ w_B has
/// |w|^2 = h^{-2k}|w_A|^2 + h^{-2(k-1)}|w_B|^2.
inline std::vector<double> pointwise_norm(const GridForm& w, Metric metric) {
  std::vector<double> out(w.size(), 0.0);
  const bool twisted = metric == Metric::twisted && w.domain().is_cylinder();
  const int k = w.degree();
  for (std::size_t c = 0; c < w.component_count(); ++c) {
    const bool has_t = has_axis(w.indices()[c], 0);
    const auto& f = w.field(c);
    for (std::size_t i = 0; i < out.size(); ++i) {
      double v = f[i] * f[i];
      if (twisted) v *= std::pow(w.domain().warp_at(i), has_t ? -2.0 * (k - 1) : -2.0 * k);
      out[i] += v;
    }
  }
  for (auto& v : out) v = std::sqrt(v);
  return out;
}

inline std::vector<double> pointwise_norm(const GridForm& w) { return pointwise_norm(w, natural_metric(w.domain())); }

/// Volume density per node: h^n on twisted cylinders (n = fiber dimension), 1 otherwise.
inline std::vector<double> volume_density(const DomainSpec& d, Metric metric) {
  std::vector<double> v(d.grid().size(), 1.0);
  if (metric == Metric::twisted && d.is_cylinder() && d.has_warp())
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(d.warp_at(i), d.fiber_dim());
  return v;
}

/// Weighted L^p norm of a scalar field with tensor trapezoid quadrature. p = inf gives the weighted sup.
inline double field_lp_norm(const Grid& g, std::span<const double> f, double p,
                            const std::vector<double>* weight = nullptr, const std::vector<double>* density = nullptr) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]) * (weight ? (*weight)[i] : 1.0));
    return m;
  }
  if (!(p >= 1.0)) throw DomainError("L^p exponent must be >= 1");
  const auto q = g.quadrature_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double v = std::abs(f[i]) * (weight ? (*weight)[i] : 1.0);
    if (v == 0.0) continue;
    s += q[i] * std::pow(v, p) * (density ? (*density)[i] : 1.0);
  }
  return std::pow(s, 1.0 / p);
}

/// ||w||_{L^p(D, weight)} with the pointwise norm and volume of `metric`.
inline double lp_norm(const GridForm& w, double p, Metric metric, const WeightProfile* weight = nullptr) {
  const auto n = pointwise_norm(w, metric);
  const auto vol = volume_density(w.domain(), metric);
  std::optional<std::vector<double>> ws;
  if (weight && !(weight->is_constant() && weight->constant_value() == 1.0)) ws = weight->sample(w.grid());
  return field_lp_norm(w.grid(), n, p, ws ? &*ws : nullptr, &vol);
}

inline double lp_norm(const GridForm& w, double p, const WeightProfile* weight = nullptr) {
  return lp_norm(w, p, natural_metric(w.domain()), weight);
}

}  // namespace lqp
