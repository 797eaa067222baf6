#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "lqp/core/stencil.hpp"
#include "lqp/forms/grid_form.hpp"

namespace lqp {

/// Set of patch indices as a bitmask (bit j <=> patch j); sorted order is bit order.
using PatchSet = std::uint32_t;

inline int patch_count_of(PatchSet I) { return std::popcount(I); }

inline std::vector<int> patches_of(PatchSet I) { return axes_of(I); }

/// Contiguous run of nodes along one axis; on periodic axes the run wraps.
struct NodeRange {
  std::ptrdiff_t start = 0;
  std::size_t length = 0;
};

namespace detail {

/// Intersection of two runs on an axis with n nodes; nullopt if empty.
/// Throws when the intersection is not a single run (the cover would not be good).
inline std::optional<NodeRange> intersect_runs(NodeRange a, NodeRange b, std::size_t n, bool periodic) {
  if (!periodic) {
    const std::ptrdiff_t lo = std::max(a.start, b.start);
    const std::ptrdiff_t hi = std::min(a.start + static_cast<std::ptrdiff_t>(a.length),
                                       b.start + static_cast<std::ptrdiff_t>(b.length));
    if (hi <= lo) return std::nullopt;
    return NodeRange{lo, static_cast<std::size_t>(hi - lo)};
  }
  std::vector<char> in(n, 0);
  for (std::size_t i = 0; i < a.length; ++i) in[wrap_index(a.start + static_cast<std::ptrdiff_t>(i), n)] |= 1;
  for (std::size_t i = 0; i < b.length; ++i) in[wrap_index(b.start + static_cast<std::ptrdiff_t>(i), n)] |= 2;
  std::size_t count = 0, starts = 0;
  std::ptrdiff_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (in[i] != 3) continue;
    ++count;
    if (in[wrap_index(static_cast<std::ptrdiff_t>(i) - 1, n)] != 3) {
      ++starts;
      start = static_cast<std::ptrdiff_t>(i);
    }
  }
  if (count == 0) return std::nullopt;
  if (count == n) throw DomainError("cover patch wraps the whole fiber");
  if (starts != 1) throw DomainError("patch intersection is not connected: cover is not good");
  return NodeRange{start, count};
}

}  // namespace detail

/// Good cover of a cylinder [a,b] x N, N a flat torus, by products of arcs:
/// V_j = [a,b] x U_j with U_j a box of fiber nodes. Every nonempty finite
/// intersection is again such a box (a convex chart).
class GoodCover {
 public:
  /// `arcs[f]` lists the arcs of fiber axis f (global axis f + 1); patches are all products.
  GoodCover(DomainPtr global, std::vector<std::vector<NodeRange>> arcs) : global_(std::move(global)), arcs_(std::move(arcs)) {
    if (!global_->is_cylinder()) throw DomainError("cover needs a cylinder domain");
    const int nf = global_->fiber_dim();
    if (static_cast<int>(arcs_.size()) != nf) throw DomainError("one arc list per fiber axis required");
    std::size_t total = 1;
    for (const auto& a : arcs_) {
      if (a.empty()) throw DomainError("empty arc list");
      total *= a.size();
    }
    if (total > 30) throw DomainError("too many patches");
    for (std::size_t j = 0; j < total; ++j) {
      std::vector<NodeRange> r{{0, global_->grid().count(0)}};
      std::size_t rem = j;
      for (int f = nf - 1; f >= 0; --f) {
        const auto& list = arcs_[static_cast<std::size_t>(f)];
        r.insert(r.begin() + 1, list[rem % list.size()]);
        rem /= list.size();
      }
      patches_.push_back(r);
    }
    build_nerve();
  }

  /// `arcs_per_axis` arcs per fiber axis, each extended by `overlap` nodes on both sides.
  static GoodCover product_arcs(DomainPtr global, int arcs_per_axis = 3, std::size_t overlap = 4) {
    if (arcs_per_axis < 3) throw DomainError("a circle needs at least 3 arcs for a good cover");
    std::vector<std::vector<NodeRange>> arcs;
    for (int f = 0; f < global->fiber_dim(); ++f) {
      const std::size_t n = global->grid().count(f + 1);
      if (2 * overlap > n / static_cast<std::size_t>(arcs_per_axis))
        throw DomainError("overlap too wide: non-adjacent arcs would meet");
      std::vector<NodeRange> list;
      for (int j = 0; j < arcs_per_axis; ++j) {
        const auto s = static_cast<std::ptrdiff_t>(std::llround(static_cast<double>(j) * n / arcs_per_axis));
        const auto e = static_cast<std::ptrdiff_t>(std::llround(static_cast<double>(j + 1) * n / arcs_per_axis));
        list.push_back({s - static_cast<std::ptrdiff_t>(overlap), static_cast<std::size_t>(e - s) + 2 * overlap});
      }
      arcs.push_back(std::move(list));
    }
    return GoodCover(std::move(global), std::move(arcs));
  }

  const DomainSpec& global() const { return *global_; }
  const DomainPtr& global_ptr() const { return global_; }
  std::size_t patch_count() const { return patches_.size(); }
  const std::vector<std::vector<NodeRange>>& arcs() const { return arcs_; }

  /// Arc index along fiber axis f of patch j.
  std::size_t arc_of(std::size_t j, int f) const {
    std::size_t rem = j;
    for (int g = global_->fiber_dim() - 1; g > f; --g) rem /= arcs_[static_cast<std::size_t>(g)].size();
    return rem % arcs_[static_cast<std::size_t>(f)].size();
  }

  /// Nonempty intersections with `level` patches (level 0: the whole cylinder, key 0).
  const std::vector<PatchSet>& nerve(int level) const {
    static const std::vector<PatchSet> none;
    if (level < 0 || level >= static_cast<int>(nerve_.size())) return none;
    return nerve_[static_cast<std::size_t>(level)];
  }
  int max_level() const { return static_cast<int>(nerve_.size()) - 1; }

  bool nonempty(PatchSet I) const { return I == 0 || ranges_.count(I) != 0; }

  /// Node runs per global axis of V_I (level 0: the full grid).
  const std::vector<NodeRange>& ranges(PatchSet I) const {
    auto it = ranges_.find(I);
    if (it == ranges_.end()) throw DomainError("empty patch intersection");
    return it->second;
  }

  /// Box chart of V_I with fiber coordinates unwrapped; level 0 gives the global domain.
  DomainPtr chart(PatchSet I) const {
    if (I == 0) return global_;
    auto it = charts_.find(I);
    if (it != charts_.end()) return it->second;
    const auto& r = ranges(I);
    const Grid& g = global_->grid();
    std::vector<Interval> fiber;
    std::vector<std::size_t> counts;
    for (int a = 1; a < g.dim(); ++a) {
      const auto& ax = g.axis(a);
      const auto s = static_cast<double>(r[static_cast<std::size_t>(a)].start);
      const double lo = ax.lo + s * ax.spacing();
      fiber.push_back({lo, lo + static_cast<double>(r[static_cast<std::size_t>(a)].length - 1) * ax.spacing()});
      counts.push_back(r[static_cast<std::size_t>(a)].length);
    }
    auto d = DomainSpec::cylinder({g.axis(0).lo, g.axis(0).hi}, g.count(0), fiber, counts, false);
    charts_[I] = d;
    return d;
  }

  /// Copies the part of `src` (on V_I) lying over V_J, J containing I.
  GridForm restrict_to(const GridForm& src, PatchSet I, PatchSet J) const {
    GridForm out(chart(J), src.degree());
    for_each_node(I, J, [&](std::size_t src_i, std::size_t dst_i) {
      for (std::size_t c = 0; c < src.component_count(); ++c) out.field(c)[dst_i] = src.field(c)[src_i];
    });
    return out;
  }

  /// dst (on V_I) += scale * field (on V_J, J containing I), extending by zero.
  void add_extended(GridForm& dst, PatchSet I, const GridForm& src, PatchSet J, double scale = 1.0) const {
    for_each_node(I, J, [&](std::size_t big_i, std::size_t small_i) {
      for (std::size_t c = 0; c < src.component_count(); ++c) dst.field(c)[big_i] += scale * src.field(c)[small_i];
    });
  }

  /// Scalar field of the global grid restricted to V_J.
  std::vector<double> restrict_field(const std::vector<double>& global_field, PatchSet J) const {
    std::vector<double> out(chart(J)->grid().size());
    for_each_node(0, J, [&](std::size_t src_i, std::size_t dst_i) { out[dst_i] = global_field[src_i]; });
    return out;
  }

  /// Calls f(index in V_I, index in V_J) for every node of V_J, where V_J lies inside V_I.
  template <class F>
  void for_each_node(PatchSet I, PatchSet J, F&& f) const {
    const Grid& g = global_->grid();
    const int d = g.dim();
    const auto& rI = I == 0 ? full_ : ranges(I);
    const auto& rJ = ranges_or_full(J);
    const Grid& gI = chart(I)->grid();
    const Grid& gJ = chart(J)->grid();
    std::vector<std::size_t> offset(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
      const std::size_t n = g.count(a);
      const auto& ri = rI[static_cast<std::size_t>(a)];
      const auto& rj = rJ[static_cast<std::size_t>(a)];
      const std::size_t off = g.axis(a).periodic ? wrap_index(rj.start - ri.start, n)
                                                 : static_cast<std::size_t>(rj.start - ri.start);
      if (I != 0 && off + rj.length > ri.length) throw DomainError("V_J is not contained in V_I");
      offset[static_cast<std::size_t>(a)] = off;
    }
    const std::size_t N = gJ.size();
    for (std::size_t j = 0; j < N; ++j) {
      std::size_t i = 0;
      for (int a = 0; a < d; ++a) {
        std::size_t idx = gJ.index_along(j, a) + offset[static_cast<std::size_t>(a)];
        if (I == 0 && g.axis(a).periodic) idx %= g.count(a);
        i += idx * gI.stride(a);
      }
      f(i, j);
    }
  }

 private:
  const std::vector<NodeRange>& ranges_or_full(PatchSet J) const { return J == 0 ? full_ : ranges(J); }

  void build_nerve() {
    const Grid& g = global_->grid();
    full_.clear();
    for (int a = 0; a < g.dim(); ++a) full_.push_back({0, g.count(a)});
    nerve_.assign(1, std::vector<PatchSet>{0});
    std::vector<PatchSet> level;
    for (std::size_t j = 0; j < patches_.size(); ++j) {
      const PatchSet I = PatchSet{1} << j;
      ranges_[I] = patches_[j];
      level.push_back(I);
    }
    while (!level.empty()) {
      nerve_.push_back(level);
      std::vector<PatchSet> next;
      for (PatchSet I : level) {
        const int top = 31 - std::countl_zero(I);
        for (std::size_t j = static_cast<std::size_t>(top) + 1; j < patches_.size(); ++j) {
          std::vector<NodeRange> r(static_cast<std::size_t>(g.dim()));
          bool empty = false;
          for (int a = 0; a < g.dim() && !empty; ++a) {
            auto x = detail::intersect_runs(ranges_[I][static_cast<std::size_t>(a)], patches_[j][static_cast<std::size_t>(a)],
                                            g.count(a), g.axis(a).periodic);
            if (!x) empty = true;
            else r[static_cast<std::size_t>(a)] = *x;
          }
          if (empty) continue;
          const PatchSet J = I | (PatchSet{1} << j);
          ranges_[J] = r;
          next.push_back(J);
        }
      }
      level = std::move(next);
    }
  }

  DomainPtr global_;
  std::vector<std::vector<NodeRange>> arcs_;
  std::vector<std::vector<NodeRange>> patches_;
  std::vector<NodeRange> full_;
  std::map<PatchSet, std::vector<NodeRange>> ranges_;
  std::vector<std::vector<PatchSet>> nerve_;
  mutable std::map<PatchSet, DomainPtr> charts_;
};

/// Partition of unity rho_j(t, x) = rho~_j(x) subordinate to a product cover. Along each fiber
/// axis an arc carries a plateau bump: 0 within `margin` nodes of its ends, 1 once the neighbouring
/// arc's bump has reached 0, with a C-infinity step exp(-1/s) / (exp(-1/s) + exp(-1/(1-s))) between.
/// Keeping rho flat near patch edges makes one-sided difference stencils agree across charts.
class PartitionOfUnity {
 public:
  static PartitionOfUnity smooth_bumps(const GoodCover& cover, std::size_t margin = 7) {
    const Grid& g = cover.global().grid();
    const int nf = cover.global().fiber_dim();
    auto step = [](double s) {
      if (s <= 0.0) return 0.0;
      if (s >= 1.0) return 1.0;
      const double f0 = std::exp(-1.0 / s), f1 = std::exp(-1.0 / (1.0 - s));
      return f0 / (f0 + f1);
    };
    std::vector<std::vector<std::vector<double>>> axis_rho(static_cast<std::size_t>(nf));
    for (int f = 0; f < nf; ++f) {
      const std::size_t n = g.count(f + 1);
      const auto& arcs = cover.arcs()[static_cast<std::size_t>(f)];
      // narrowest overlap between neighbouring arcs
      std::ptrdiff_t shared = std::numeric_limits<std::ptrdiff_t>::max();
      for (std::size_t j = 0; j < arcs.size(); ++j) {
        const auto& next = arcs[(j + 1) % arcs.size()];
        const std::ptrdiff_t end = arcs[j].start + static_cast<std::ptrdiff_t>(arcs[j].length);
        const std::ptrdiff_t lead = next.start + (j + 1 == arcs.size() ? static_cast<std::ptrdiff_t>(n) : 0);
        shared = std::min(shared, end - lead);
      }
      const auto m = static_cast<std::ptrdiff_t>(margin);
      if (shared < 2 * m) throw DomainError("arc overlap narrower than twice the partition margin");
      std::vector<std::vector<double>> phi(arcs.size(), std::vector<double>(n, 0.0));
      std::vector<double> sum(n, 0.0);
      for (std::size_t j = 0; j < arcs.size(); ++j) {
        const auto len = static_cast<std::ptrdiff_t>(arcs[j].length);
        for (std::ptrdiff_t i = 0; i < len; ++i) {
          const std::ptrdiff_t e = std::min(i, len - 1 - i);
          const double v = step(static_cast<double>(e - (m - 1)) / static_cast<double>(shared - m - (m - 1)));
          phi[j][wrap_index(arcs[j].start + i, n)] = v;
        }
        for (std::size_t i = 0; i < n; ++i) sum[i] += phi[j][i];
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!(sum[i] > 0.0)) throw DomainError("arcs do not cover the fiber with interior points");
        for (auto& row : phi) row[i] /= sum[i];
      }
      axis_rho[static_cast<std::size_t>(f)] = std::move(phi);
    }
    PartitionOfUnity out;
    for (std::size_t j = 0; j < cover.patch_count(); ++j) {
      std::vector<double> rho(g.size(), 1.0);
      for (std::size_t i = 0; i < g.size(); ++i)
        for (int f = 0; f < nf; ++f)
          rho[i] *= axis_rho[static_cast<std::size_t>(f)][cover.arc_of(j, f)][g.index_along(i, f + 1)];
      out.rho_.push_back(std::move(rho));
    }
    out.validate(cover);
    return out;
  }

  std::size_t size() const { return rho_.size(); }
  const std::vector<double>& rho(std::size_t j) const { return rho_[j]; }

  /// Checks rho >= 0, sum = 1 to 1e-10 and rho_j = 0 at nodes outside the interior of V_j.
  void validate(const GoodCover& cover, double tol = 1e-10) const {
    if (rho_.size() != cover.patch_count()) throw DomainError("one partition function per patch required");
    const Grid& g = cover.global().grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
      double s = 0.0;
      for (const auto& r : rho_) {
        if (r[i] < 0.0) throw DomainError("partition of unity has a negative value");
        s += r[i];
      }
      if (std::abs(s - 1.0) > tol) throw DomainError("partition of unity does not sum to one");
    }
    for (std::size_t j = 0; j < rho_.size(); ++j) {
      const auto& r = cover.ranges(PatchSet{1} << j);
      for (std::size_t i = 0; i < g.size(); ++i) {
        bool interior = true;
        for (int a = 1; a < g.dim(); ++a) {
          const std::size_t n = g.count(a);
          const std::size_t off = wrap_index(static_cast<std::ptrdiff_t>(g.index_along(i, a)) - r[static_cast<std::size_t>(a)].start, n);
          interior = interior && off > 0 && off + 1 < r[static_cast<std::size_t>(a)].length;
        }
        if (!interior && rho_[j][i] != 0.0) throw DomainError("partition function leaves its patch");
      }
    }
  }

 private:
  std::vector<std::vector<double>> rho_;
};

}  // namespace lqp
