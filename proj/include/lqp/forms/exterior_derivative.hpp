#pragma once

#include <vector>

#include "lqp/core/stencil.hpp"
#include "lqp/forms/grid_form.hpp"

namespace lqp {

struct DerivativeOptions {
  /// Formal accuracy order of the difference stencils (2, 4, 6, ...).
  int order = 6;
};

/// Partial derivative of one field along axis a.
inline std::vector<double> partial_derivative(const Grid& g, int a, std::span<const double> f,
                                              const DerivativeOptions& opt = {}) {
  std::vector<double> out;
  apply_along_axis(g, a, derivative_stencils(g.axis(a), opt.order), f, out);
  return out;
}

/// Discrete exterior derivative: (d w)_J = sum_{a in J} sign * d_a w_{J - a}.
/// Difference operators along distinct axes commute, so d(d w) vanishes to rounding.
inline GridForm exterior_derivative(const GridForm& w, const DerivativeOptions& opt = {}) {
  const int n = w.dim(), k = w.degree();
  if (k >= n) throw DomainError("exterior derivative of a top-degree form");
  GridForm out(w.domain_ptr(), k + 1);
  const Grid& g = w.grid();
  std::vector<std::vector<Stencil>> stencils(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) stencils[static_cast<std::size_t>(a)] = derivative_stencils(g.axis(a), opt.order);
  std::vector<double> tmp;
  for (std::size_t c = 0; c < w.component_count(); ++c) {
    const MultiIndex I = w.indices()[c];
    for (int a = 0; a < n; ++a) {
      if (has_axis(I, a)) continue;
      apply_along_axis(g, a, stencils[static_cast<std::size_t>(a)], w.field(c), tmp);
      const MultiIndex J = I | (MultiIndex{1} << a);
      const double s = wedge_sign(a, I);
      auto& dst = out[J];
      for (std::size_t i = 0; i < tmp.size(); ++i) dst[i] += s * tmp[i];
    }
  }
  return out;
}

}  // namespace lqp
