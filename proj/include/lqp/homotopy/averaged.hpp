#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lqp/homotopy/cone.hpp"
#include "lqp/forms/norms.hpp"
#include "lqp/forms/weight.hpp"

namespace lqp {

/// Discrete probability measure of centres y with masses summing to one.
struct CenterMeasure {
  std::vector<std::vector<double>> points;
  std::vector<double> masses;
};

/// Tensor grid over the bounding box of `g` with `counts` nodes per axis.
inline Grid center_grid(const Grid& g, const std::vector<std::size_t>& counts) {
  if (static_cast<int>(counts.size()) != g.dim()) throw DomainError("y-grid dimension mismatch");
  std::vector<Axis> axes;
  for (int a = 0; a < g.dim(); ++a) axes.push_back({g.axis(a).lo, g.axis(a).hi, counts[static_cast<std::size_t>(a)], false});
  return Grid(std::move(axes));
}

/// Samples alpha on the y-grid with trapezoid masses and rescales them to total one.
inline CenterMeasure center_measure(const WeightProfile& alpha, const Grid& domain_grid,
                                    const std::vector<std::size_t>& counts) {
  const Grid yg = center_grid(domain_grid, counts);
  const auto q = yg.quadrature_weights();
  const auto a = alpha.sample(yg);
  CenterMeasure m;
  double total = 0.0;
  for (std::size_t i = 0; i < yg.size(); ++i) {
    if (!std::isfinite(a[i]) || a[i] < 0.0) throw DomainError("weight alpha must be finite and non-negative on the y-grid");
    const double mass = q[i] * a[i];
    if (mass == 0.0) continue;
    m.points.push_back(yg.point(i));
    m.masses.push_back(mass);
    total += mass;
  }
  if (!(total > 0.0)) throw DomainError("weight alpha has zero mass on the y-grid");
  for (auto& v : m.masses) v /= total;
  return m;
}

/// A_alpha w = sum_y mass(y) K_y w.
inline GridForm averaged_homotopy(const GridForm& w, const CenterMeasure& alpha, const HomotopyOptions& opt = {}) {
  detail::require_convex_chart(w);
  if (w.degree() == 0) throw DomainError("A_alpha is only defined for degree >= 1");
  double total = 0.0;
  for (double m : alpha.masses) total += m;
  if (std::abs(total - 1.0) > 1e-8) throw DomainError("centre measure is not normalized");
  GridForm out(w.domain_ptr(), w.degree() - 1);
  detail::ConeWorkspace ws;
  for (std::size_t i = 0; i < alpha.points.size(); ++i) {
    detail::require_inside(w.grid(), alpha.points[i], "centre y");
    detail::accumulate_cone(w, alpha.points[i], alpha.masses[i], out, opt, ws);
  }
  return out;
}

inline GridForm averaged_homotopy(const GridForm& w, const WeightProfile& alpha, const std::vector<std::size_t>& y_grid,
                                  const HomotopyOptions& opt = {}) {
  return averaged_homotopy(w, center_measure(alpha, w.grid(), y_grid), opt);
}

struct AdmissibilityReport {
  bool admissible = true;
  double mass = 0.0;
  double norm = 0.0;  // ||alpha||_{L^{p'}}
  /// ||alpha |y| ||_{L^{p'}}; for power laws the bound ||alpha||_{L^{p'}} max|y|
  double moment_norm = 0.0;
  std::vector<std::string> violations;
};

inline double conjugate_exponent(double p) {
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

/// Checks unit mass and finiteness of ||alpha||_{p'} and ||alpha |y|||_{p'} on the box of `g`.
/// Power laws (b - y_a)^(-lambda) are decided by their exponents; other profiles by trapezoid sums on `g`.
inline AdmissibilityReport check_admissible_weight(const WeightProfile& alpha, const Grid& g, double p,
                                                   double mass_tolerance = 1e-8) {
  if (!(p >= 1.0)) throw DomainError("L^p exponent must be >= 1");
  const double pc = conjugate_exponent(p);
  AdmissibilityReport r;
  if (const auto& pl = alpha.power()) {
    const auto& ax = g.axis(pl->axis);
    double other = 1.0;
    for (int a = 0; a < g.dim(); ++a)
      if (a != pl->axis) other *= g.axis(a).length();
    const bool singular = pl->b <= ax.hi && pl->lambda > 0.0;
    // int_lo^hi (b - s)^(-lambda) ds
    auto power_integral = [&](double e) {
      const double u0 = pl->b - ax.lo, u1 = pl->b - ax.hi;
      if (singular && e >= 1.0) return std::numeric_limits<double>::infinity();
      if (e == 1.0) return std::log(u0 / u1);
      return (std::pow(u0, 1.0 - e) - std::pow(std::max(u1, 0.0), 1.0 - e)) / (1.0 - e);
    };
    r.mass = pl->scale * other * power_integral(pl->lambda);
    if (std::isinf(pc)) {
      r.norm = singular ? std::numeric_limits<double>::infinity() : pl->scale * std::pow(pl->b - ax.hi, -pl->lambda);
    } else {
      r.norm = pl->scale * std::pow(other * power_integral(pl->lambda * pc), 1.0 / pc);
    }
    double ymax = 0.0;
    for (int a = 0; a < g.dim(); ++a)
      ymax += std::pow(std::max(std::abs(g.axis(a).lo), std::abs(g.axis(a).hi)), 2.0);
    r.moment_norm = std::isinf(r.norm) ? r.norm : r.norm * std::sqrt(ymax);
  } else {
    const auto a = alpha.sample(g);
    const auto q = g.quadrature_weights();
    std::vector<double> moment(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      r.mass += q[i] * a[i];
      double s = 0.0;
      for (int ax = 0; ax < g.dim(); ++ax) s += g.coordinate(i, ax) * g.coordinate(i, ax);
      moment[i] = a[i] * std::sqrt(s);
    }
    r.norm = field_lp_norm(g, a, pc);
    r.moment_norm = field_lp_norm(g, moment, pc);
  }
  if (!std::isfinite(r.mass)) r.violations.push_back("alpha is not integrable (unit mass impossible)");
  else if (std::abs(r.mass - 1.0) > mass_tolerance) r.violations.push_back("alpha does not have unit mass");
  if (!std::isfinite(r.norm)) r.violations.push_back("||alpha||_{L^{p'}} diverges");
  if (!std::isfinite(r.moment_norm)) r.violations.push_back("||alpha |y| ||_{L^{p'}} diverges");
  r.admissible = r.violations.empty();
  return r;
}

}  // namespace lqp
