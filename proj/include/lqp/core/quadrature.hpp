#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "lqp/core/error.hpp"

namespace lqp {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n nodes on [lo, hi] (Newton iteration on P_n).
inline QuadratureRule gauss_legendre(int n, double lo = 0.0, double hi = 1.0) {
  if (n < 1) throw Error("Gauss-Legendre needs at least one node");
  QuadratureRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  const double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p1 = 1.0, p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    dp = n * (z * p1 - p2) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.nodes[static_cast<std::size_t>(i)] = mid - half * z;
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = mid + half * z;
    r.weights[static_cast<std::size_t>(i)] = half * w;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = half * w;
  }
  return r;
}

/// Composite Gauss-Legendre: `panels` equal panels of `order` nodes each on [lo, hi].
inline QuadratureRule composite_gauss_legendre(int panels, int order, double lo, double hi) {
  QuadratureRule r;
  const double h = (hi - lo) / panels;
  const auto base = gauss_legendre(order, 0.0, 1.0);
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
      r.nodes.push_back(a + h * base.nodes[i]);
      r.weights.push_back(h * base.weights[i]);
    }
  }
  return r;
}

/// Nodes on [0,1) clustered at t = 1 through t = 1 - (1-u)^grading, u on a composite rule.
inline QuadratureRule graded_unit_rule(int panels, int order, double grading = 3.0) {
  const auto u = composite_gauss_legendre(panels, order, 0.0, 1.0);
  QuadratureRule r;
  for (std::size_t i = 0; i < u.nodes.size(); ++i) {
    const double s = 1.0 - u.nodes[i];
    r.nodes.push_back(1.0 - std::pow(s, grading));
    r.weights.push_back(u.weights[i] * grading * std::pow(s, grading - 1.0));
  }
  return r;
}

inline double integrate(const QuadratureRule& rule, const std::function<double(double)>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
  return s;
}

}  // namespace lqp
