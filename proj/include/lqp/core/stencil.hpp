#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "lqp/core/grid.hpp"

namespace lqp {

/// Finite-difference weights for the m-th derivative at x0 on arbitrary nodes
/// (Fornberg's recursion). Returns weights for derivative order m only.
inline std::vector<double> fornberg_weights(double x0, std::span<const double> x, int m) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(static_cast<std::size_t>(m) + 1, 0.0));
  double c1 = 1.0, c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min<std::size_t>(i, static_cast<std::size_t>(m));
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k)
          c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k)
        c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][static_cast<std::size_t>(m)];
  return w;
}

/// Taps of a one-dimensional linear stencil anchored at `start` (indices wrap on periodic axes).
struct Stencil {
  std::ptrdiff_t start = 0;
  std::vector<double> w;
};

inline std::size_t wrap_index(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

/// First-derivative stencils along one axis. Interior stencils are centred;
/// near the ends of closed axes they shift inward and stay the same width.
inline std::vector<Stencil> derivative_stencils(const Axis& ax, int order) {
  const std::size_t n = ax.count;
  std::size_t width = static_cast<std::size_t>(order) + 1;
  if (width % 2 == 0) ++width;
  if (!ax.periodic) width = std::min(width, n);
  else width = std::min(width, n % 2 == 0 ? n - 1 : n);
  const double h = ax.spacing();
  std::vector<Stencil> out(n);
  const auto half = static_cast<std::ptrdiff_t>(width / 2);
  std::vector<double> nodes(width);
  for (std::size_t i = 0; i < n; ++i) {
    std::ptrdiff_t start = static_cast<std::ptrdiff_t>(i) - half;
    if (!ax.periodic)
      start = std::clamp<std::ptrdiff_t>(start, 0, static_cast<std::ptrdiff_t>(n - width));
    for (std::size_t j = 0; j < width; ++j)
      nodes[j] = static_cast<double>(start + static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i));
    auto w = fornberg_weights(0.0, nodes, 1);
    for (auto& v : w) v /= h;
    out[i] = {start, std::move(w)};
  }
  return out;
}

/// Lagrange interpolation stencil with `points` taps at coordinate z.
inline Stencil interpolation_stencil(const Axis& ax, double z, int points) {
  const std::size_t n = ax.count;
  const std::size_t width = ax.periodic ? static_cast<std::size_t>(points)
                                        : std::min<std::size_t>(static_cast<std::size_t>(points), n);
  const double h = ax.spacing();
  double u = (z - ax.lo) / h;
  if (ax.periodic) {
    const double nn = static_cast<double>(n);
    u = u - nn * std::floor(u / nn);
  }
  auto cell = static_cast<std::ptrdiff_t>(std::floor(u));
  std::ptrdiff_t start = cell - static_cast<std::ptrdiff_t>(width) / 2 + 1;
  if (!ax.periodic) start = std::clamp<std::ptrdiff_t>(start, 0, static_cast<std::ptrdiff_t>(n - width));
  Stencil s{start, std::vector<double>(width)};
  // exact node hit keeps the value untouched by rounding
  const double r = u - std::round(u);
  if (std::abs(r) < 1e-13) {
    const auto node = static_cast<std::ptrdiff_t>(std::round(u));
    for (std::size_t j = 0; j < width; ++j)
      s.w[j] = (start + static_cast<std::ptrdiff_t>(j) == node) ? 1.0 : 0.0;
    bool hit = false;
    for (double v : s.w) hit = hit || v == 1.0;
    if (hit) return s;
  }
  for (std::size_t j = 0; j < width; ++j) {
    const double xj = static_cast<double>(start + static_cast<std::ptrdiff_t>(j));
    double l = 1.0;
    for (std::size_t m = 0; m < width; ++m) {
      if (m == j) continue;
      const double xm = static_cast<double>(start + static_cast<std::ptrdiff_t>(m));
      l *= (u - xm) / (xj - xm);
    }
    s.w[j] = l;
  }
  return s;
}

/// Applies one stencil per output index along axis `a`; other axes untouched.
/// `out` is resized to the grid size.
inline void apply_along_axis(const Grid& g, int a, const std::vector<Stencil>& st, std::span<const double> in,
                             std::vector<double>& out) {
  const std::size_t n = g.count(a), inner = g.stride(a), outer = g.size() / (n * inner);
  const bool periodic = g.axis(a).periodic;
  out.assign(g.size(), 0.0);
  if (inner == 1) {
    for (std::size_t o = 0; o < outer; ++o) {
      const double* row = in.data() + o * n;
      double* dst = out.data() + o * n;
      for (std::size_t i = 0; i < n; ++i) {
        const Stencil& s = st[i];
        double acc = 0.0;
        for (std::size_t j = 0; j < s.w.size(); ++j) {
          const std::ptrdiff_t raw = s.start + static_cast<std::ptrdiff_t>(j);
          acc += s.w[j] * row[periodic ? wrap_index(raw, n) : static_cast<std::size_t>(raw)];
        }
        dst[i] = acc;
      }
    }
    return;
  }
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t base = o * n * inner;
    for (std::size_t i = 0; i < n; ++i) {
      double* dst = out.data() + base + i * inner;
      const Stencil& s = st[i];
      for (std::size_t j = 0; j < s.w.size(); ++j) {
        const double w = s.w[j];
        if (w == 0.0) continue;
        const std::ptrdiff_t raw = s.start + static_cast<std::ptrdiff_t>(j);
        const std::size_t src_i = periodic ? wrap_index(raw, n) : static_cast<std::size_t>(raw);
        const double* src = in.data() + base + src_i * inner;
        for (std::size_t k = 0; k < inner; ++k) dst[k] += w * src[k];
      }
    }
  }
}

/// Separable resampling: out(i) = sum_j prod_a W_a[i_a][j_a] in(j), one pass per axis.
inline void resample_separable(const Grid& g, const std::vector<std::vector<Stencil>>& per_axis,
                               std::span<const double> in, std::vector<double>& out, std::vector<double>& scratch) {
  const int d = g.dim();
  scratch.assign(in.begin(), in.end());
  for (int a = 0; a < d; ++a) {
    apply_along_axis(g, a, per_axis[static_cast<std::size_t>(a)], scratch, out);
    if (a + 1 < d) scratch.swap(out);
  }
  if (d == 0) out = scratch;
}

/// Value of a grid field at an arbitrary point by tensor Lagrange interpolation.
inline double interpolate_at(const Grid& g, std::span<const double> field, std::span<const double> point,
                             int points) {
  const int d = g.dim();
  std::vector<Stencil> st(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) st[static_cast<std::size_t>(a)] = interpolation_stencil(g.axis(a), point[static_cast<std::size_t>(a)], points);
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    std::size_t flat = 0;
    for (int a = 0; a < d; ++a) {
      const auto& s = st[static_cast<std::size_t>(a)];
      const std::size_t j = idx[static_cast<std::size_t>(a)];
      w *= s.w[j];
      const std::ptrdiff_t raw = s.start + static_cast<std::ptrdiff_t>(j);
      const std::size_t node = g.axis(a).periodic ? wrap_index(raw, g.count(a)) : static_cast<std::size_t>(raw);
      flat += node * g.stride(a);
    }
    if (w != 0.0) sum += w * field[flat];
    int a = d - 1;
    while (a >= 0) {
      if (++idx[static_cast<std::size_t>(a)] < st[static_cast<std::size_t>(a)].w.size()) break;
      idx[static_cast<std::size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
  }
  return sum;
}

}  // namespace lqp
