#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "lqp/core/error.hpp"
#include "lqp/core/grid.hpp"

namespace lqp {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

enum class DomainKind { box, cylinder, twisted_cylinder };

inline std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::box: return "box";
    case DomainKind::cylinder: return "cylinder";
    case DomainKind::twisted_cylinder: return "twisted_cylinder";
  }
  return "box";
}

inline DomainKind domain_kind_from_string(const std::string& s) {
  if (s == "box") return DomainKind::box;
  if (s == "cylinder") return DomainKind::cylinder;
  if (s == "twisted_cylinder") return DomainKind::twisted_cylinder;
  throw DomainError("unknown domain kind '" + s + "'");
}

/// Sampled domain. Cylinders use axis 0 for t in [a, b] and the remaining
/// axes for the fiber; a twisted cylinder also stores warp samples h > 0 on the grid.
class DomainSpec {
 public:
  DomainSpec(DomainKind kind, Grid grid, std::vector<double> warp = {})
      : kind_(kind), grid_(std::move(grid)), warp_(std::move(warp)) {
    validate();
  }

  static std::shared_ptr<const DomainSpec> box(const std::vector<Interval>& bounds,
                                               const std::vector<std::size_t>& counts) {
    if (bounds.size() != counts.size()) throw DomainError("bounds/counts size mismatch");
    std::vector<Axis> axes;
    for (std::size_t a = 0; a < bounds.size(); ++a) axes.push_back({bounds[a].lo, bounds[a].hi, counts[a], false});
    return std::make_shared<const DomainSpec>(DomainKind::box, Grid(std::move(axes)));
  }

  /// [a,b] x fiber; fiber axes are periodic unless `periodic_fiber` is false.
  static std::shared_ptr<const DomainSpec> cylinder(Interval t, std::size_t t_count,
                                                    const std::vector<Interval>& fiber,
                                                    const std::vector<std::size_t>& fiber_counts,
                                                    bool periodic_fiber = true) {
    return std::make_shared<const DomainSpec>(DomainKind::cylinder,
                                              cylinder_grid(t, t_count, fiber, fiber_counts, periodic_fiber));
  }

  static std::shared_ptr<const DomainSpec> twisted(Interval t, std::size_t t_count,
                                                   const std::vector<Interval>& fiber,
                                                   const std::vector<std::size_t>& fiber_counts,
                                                   std::vector<double> warp, bool periodic_fiber = true) {
    return std::make_shared<const DomainSpec>(DomainKind::twisted_cylinder,
                                              cylinder_grid(t, t_count, fiber, fiber_counts, periodic_fiber),
                                              std::move(warp));
  }

  template <class F>
  static std::shared_ptr<const DomainSpec> twisted_from(Interval t, std::size_t t_count,
                                                        const std::vector<Interval>& fiber,
                                                        const std::vector<std::size_t>& fiber_counts, F&& h,
                                                        bool periodic_fiber = true) {
    Grid g = cylinder_grid(t, t_count, fiber, fiber_counts, periodic_fiber);
    std::vector<double> warp(g.size());
    std::vector<double> x(static_cast<std::size_t>(g.dim() - 1));
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (int a = 1; a < g.dim(); ++a) x[static_cast<std::size_t>(a - 1)] = g.coordinate(i, a);
      warp[i] = h(g.coordinate(i, 0), std::span<const double>(x));
    }
    return std::make_shared<const DomainSpec>(DomainKind::twisted_cylinder, std::move(g), std::move(warp));
  }

  DomainKind kind() const { return kind_; }
  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  bool is_cylinder() const { return kind_ != DomainKind::box; }
  int fiber_dim() const { return is_cylinder() ? dim() - 1 : 0; }
  bool has_warp() const { return !warp_.empty(); }
  const std::vector<double>& warp() const { return warp_; }
  double warp_at(std::size_t flat) const { return warp_.empty() ? 1.0 : warp_[flat]; }

  void validate() const {
    if (grid_.dim() < 1) throw DomainError("domain needs at least one axis");
    for (const auto& ax : grid_.axes())
      if (ax.count < 3) throw DomainError("grid counts must be at least 3 per axis");
    if (is_cylinder() && grid_.axis(0).periodic) throw DomainError("cylinder t-axis cannot be periodic");
    if (kind_ == DomainKind::twisted_cylinder) {
      if (warp_.size() != grid_.size()) throw DomainError("warp samples do not match grid size");
      for (double h : warp_)
        if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("warp must be finite and positive");
    } else if (!warp_.empty()) {
      throw DomainError("warp samples only allowed on twisted cylinders");
    }
  }

  bool same_grid(const DomainSpec& o) const {
    if (dim() != o.dim()) return false;
    for (int a = 0; a < dim(); ++a) {
      const auto& x = grid_.axis(a);
      const auto& y = o.grid_.axis(a);
      if (x.lo != y.lo || x.hi != y.hi || x.count != y.count || x.periodic != y.periodic) return false;
    }
    return true;
  }

 private:
  static Grid cylinder_grid(Interval t, std::size_t t_count, const std::vector<Interval>& fiber,
                            const std::vector<std::size_t>& fiber_counts, bool periodic_fiber) {
    if (fiber.size() != fiber_counts.size()) throw DomainError("fiber bounds/counts size mismatch");
    std::vector<Axis> axes{{t.lo, t.hi, t_count, false}};
    for (std::size_t a = 0; a < fiber.size(); ++a)
      axes.push_back({fiber[a].lo, fiber[a].hi, fiber_counts[a], periodic_fiber});
    return Grid(std::move(axes));
  }

  DomainKind kind_;
  Grid grid_;
  std::vector<double> warp_;
};

using DomainPtr = std::shared_ptr<const DomainSpec>;

}  // namespace lqp
