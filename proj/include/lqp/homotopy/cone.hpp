#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "lqp/core/quadrature.hpp"
#include "lqp/core/stencil.hpp"
#include "lqp/forms/grid_form.hpp"

namespace lqp {

struct HomotopyOptions {
  /// Gauss-Legendre nodes for the t-integral
  int t_nodes = 32;
  /// Lagrange taps per axis when sampling w(t x + (1-t) y) off the grid
  int interpolation_points = 6;
};

namespace detail {

inline void require_convex_chart(const GridForm& w) {
  for (const auto& ax : w.grid().axes())
    if (ax.periodic) throw DomainError("cone homotopy needs a convex chart (no periodic axes)");
}

inline void require_inside(const Grid& g, std::span<const double> p, const char* what) {
  if (static_cast<int>(p.size()) != g.dim()) throw DomainError(std::string(what) + " has the wrong dimension");
  for (int a = 0; a < g.dim(); ++a) {
    const auto& ax = g.axis(a);
    const double tol = 1e-12 * (ax.hi - ax.lo);
    if (p[static_cast<std::size_t>(a)] < ax.lo - tol || p[static_cast<std::size_t>(a)] > ax.hi + tol)
      throw DomainError(std::string(what) + " lies outside the domain");
  }
}

/// Buffers reused across centres of an averaged homotopy.
struct ConeWorkspace {
  std::vector<std::vector<double>> coordinates;  // per axis, per node index
  std::vector<std::vector<double>> displacement;  // per axis, full field of x_a - y_a
  std::vector<std::vector<double>> values;  // per input component
  std::vector<double> scratch;
  std::vector<std::vector<Stencil>> stencils;
};

/// out += weight * K_y w
inline void accumulate_cone(const GridForm& w, std::span<const double> y, double weight, GridForm& out,
                            const HomotopyOptions& opt, ConeWorkspace& ws) {
  const Grid& g = w.grid();
  const int d = g.dim(), k = w.degree();
  const std::size_t N = g.size();
  if (ws.coordinates.size() != static_cast<std::size_t>(d)) {
    ws.coordinates.assign(static_cast<std::size_t>(d), {});
    for (int a = 0; a < d; ++a)
      for (std::size_t i = 0; i < g.count(a); ++i) ws.coordinates[static_cast<std::size_t>(a)].push_back(g.axis(a).coordinate(i));
  }
  ws.displacement.assign(static_cast<std::size_t>(d), std::vector<double>(N));
  for (int a = 0; a < d; ++a) {
    auto& disp = ws.displacement[static_cast<std::size_t>(a)];
    const auto& xs = ws.coordinates[static_cast<std::size_t>(a)];
    for (std::size_t i = 0; i < N; ++i) disp[i] = xs[g.index_along(i, a)] - y[static_cast<std::size_t>(a)];
  }
  ws.values.resize(w.component_count());
  ws.stencils.assign(static_cast<std::size_t>(d), {});
  const auto rule = gauss_legendre(opt.t_nodes, 0.0, 1.0);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double t = rule.nodes[q];
    for (int a = 0; a < d; ++a) {
      auto& st = ws.stencils[static_cast<std::size_t>(a)];
      const auto& xs = ws.coordinates[static_cast<std::size_t>(a)];
      st.resize(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i)
        st[i] = interpolation_stencil(g.axis(a), t * xs[i] + (1.0 - t) * y[static_cast<std::size_t>(a)],
                                      opt.interpolation_points);
    }
    for (std::size_t c = 0; c < w.component_count(); ++c)
      resample_separable(g, ws.stencils, w.field(c), ws.values[c], ws.scratch);
    const double factor = weight * rule.weights[q] * std::pow(t, k - 1);
    for (std::size_t oc = 0; oc < out.component_count(); ++oc) {
      const MultiIndex J = out.indices()[oc];
      auto& dst = out.field(oc);
      for (int a = 0; a < d; ++a) {
        if (has_axis(J, a)) continue;
        const MultiIndex I = J | (MultiIndex{1} << a);
        const double s = factor * wedge_sign(a, J);
        const auto& v = ws.values[static_cast<std::size_t>(w.position(I))];
        const auto& disp = ws.displacement[static_cast<std::size_t>(a)];
        for (std::size_t i = 0; i < N; ++i) dst[i] += s * disp[i] * v[i];
      }
    }
  }
}

}  // namespace detail

/// Interior product i_v w at one node, as a coefficient vector over increasing (k-1)-indices.
inline std::vector<double> interior_product(int dim, int k, std::span<const double> coeffs, std::span<const double> v) {
  const auto out_idx = increasing_indices(dim, k - 1);
  const auto in_pos = index_positions(dim, k);
  std::vector<double> out(out_idx.size(), 0.0);
  for (std::size_t oc = 0; oc < out_idx.size(); ++oc) {
    const MultiIndex J = out_idx[oc];
    for (int a = 0; a < dim; ++a) {
      if (has_axis(J, a)) continue;
      out[oc] += wedge_sign(a, J) * v[static_cast<std::size_t>(a)] *
                 coeffs[static_cast<std::size_t>(in_pos[J | (MultiIndex{1} << a)])];
    }
  }
  return out;
}

/// dt-component of the cone pullback at (x, t):
/// t^{k-1} i_{x-y} w(t x + (1-t) y), with w interpolated off the grid.
inline std::vector<double> cone_pullback_fiber(const GridForm& w, std::span<const double> y, std::span<const double> x,
                                               double t, int interpolation_points = 6) {
  detail::require_convex_chart(w);
  const Grid& g = w.grid();
  detail::require_inside(g, y, "centre y");
  detail::require_inside(g, x, "point x");
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("t must lie in [0,1]");
  const int d = g.dim(), k = w.degree();
  if (k == 0) throw DomainError("pullback dt-component of a 0-form is zero; degree must be >= 1");
  std::vector<double> z(static_cast<std::size_t>(d)), v(static_cast<std::size_t>(d)), c(w.component_count());
  for (int a = 0; a < d; ++a) {
    z[static_cast<std::size_t>(a)] = t * x[static_cast<std::size_t>(a)] + (1.0 - t) * y[static_cast<std::size_t>(a)];
    v[static_cast<std::size_t>(a)] = x[static_cast<std::size_t>(a)] - y[static_cast<std::size_t>(a)];
  }
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = interpolate_at(g, w.field(i), z, interpolation_points);
  auto out = interior_product(d, k, c, v);
  const double tk = std::pow(t, k - 1);
  for (auto& o : out) o *= tk;
  return out;
}

/// Cone homotopy K_y w = int_0^1 t^{k-1} i_{x-y} w(t x + (1-t) y) dt on a convex chart.
/// K_y dw + d K_y w = w for k >= 1; degree-0 input is rejected.
inline GridForm cone_homotopy(const GridForm& w, std::span<const double> y, const HomotopyOptions& opt = {}) {
  detail::require_convex_chart(w);
  detail::require_inside(w.grid(), y, "centre y");
  if (w.degree() == 0) throw DomainError("K_y is only defined for degree >= 1");
  GridForm out(w.domain_ptr(), w.degree() - 1);
  detail::ConeWorkspace ws;
  detail::accumulate_cone(w, y, 1.0, out, opt, ws);
  return out;
}

}  // namespace lqp
