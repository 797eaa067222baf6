#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "lqp/forms/grid_form.hpp"
#include "lqp/forms/weight.hpp"

namespace lqp {

/// w = a + dt ^ b with a free of dt (degree k) and b free of dt (degree k-1).
struct CylinderSplit {
  GridForm a;
  std::optional<GridForm> b;
};

inline CylinderSplit decompose_cylinder(const GridForm& w) {
  if (!w.domain().is_cylinder()) throw DomainError("decomposition needs a cylinder domain");
  const int k = w.degree();
  CylinderSplit out{GridForm(w.domain_ptr(), k), std::nullopt};
  if (k >= 1) out.b = GridForm(w.domain_ptr(), k - 1);
  for (std::size_t c = 0; c < w.component_count(); ++c) {
    const MultiIndex I = w.indices()[c];
    // t is axis 0, the smallest index, so dt ^ dx_J = dx_{0 J} with sign +1
    if (has_axis(I, 0)) (*out.b)[I & ~MultiIndex{1}] = w.field(c);
    else out.a[I] = w.field(c);
  }
  return out;
}

inline GridForm recompose_cylinder(const CylinderSplit& s) {
  GridForm out = s.a;
  if (s.b) {
    const GridForm& b = *s.b;
    for (std::size_t c = 0; c < b.component_count(); ++c) {
      const MultiIndex J = b.indices()[c];
      if (has_axis(J, 0)) {
        for (double v : b.field(c))
          if (v != 0.0) throw DomainError("b part of a cylinder split must be free of dt");
        continue;
      }
      out[J | MultiIndex{1}] = b.field(c);
    }
  }
  return out;
}

/// Fiber-wise minimum and maximum of the warp at each t node.
struct FiberEnvelope {
  std::vector<double> t;
  std::vector<double> min_h;
  std::vector<double> max_h;
};

inline FiberEnvelope fiber_envelope(const DomainSpec& d) {
  if (!d.is_cylinder()) throw DomainError("fiber envelope needs a cylinder domain");
  const Grid& g = d.grid();
  const std::size_t nt = g.count(0), fiber = g.stride(0);
  FiberEnvelope e;
  for (std::size_t it = 0; it < nt; ++it) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t j = 0; j < fiber; ++j) {
      const double h = d.warp_at(it * fiber + j);
      lo = std::min(lo, h);
      hi = std::max(hi, h);
    }
    e.t.push_back(g.axis(0).coordinate(it));
    e.min_h.push_back(lo);
    e.max_h.push_back(hi);
  }
  return e;
}

/// min / max over the fiber of h^e; x -> h^e is monotone, so envelope values suffice.
inline double envelope_min_power(double min_h, double max_h, double e) {
  return e >= 0.0 ? std::pow(min_h, e) : std::pow(max_h, e);
}
inline double envelope_max_power(double min_h, double max_h, double e) {
  return e >= 0.0 ? std::pow(max_h, e) : std::pow(min_h, e);
}

/// f_{k,p}(t) = min_x h^{n/p - k},  F_{k,p}(t) = max_x h^{n/p - k}, n the fiber dimension.
struct FFProfiles {
  std::vector<double> t;
  std::vector<double> f;
  std::vector<double> F;

  WeightProfile lower() const { return as_profile(f); }
  WeightProfile upper() const { return as_profile(F); }

 private:
  WeightProfile as_profile(const std::vector<double>& v) const {
    return WeightProfile::sampled_axis(Axis{t.front(), t.back(), t.size(), false}, v, 0);
  }
};

inline FFProfiles fF_profiles(const DomainSpec& d, int k, double p) {
  if (d.kind() != DomainKind::twisted_cylinder) throw DomainError("fF profiles need a twisted cylinder");
  if (!(p >= 1.0)) throw DomainError("L^p exponent must be >= 1");
  const auto env = fiber_envelope(d);
  const double e = d.fiber_dim() / p - k;
  FFProfiles out{env.t, {}, {}};
  for (std::size_t i = 0; i < env.t.size(); ++i) {
    out.f.push_back(envelope_min_power(env.min_h[i], env.max_h[i], e));
    out.F.push_back(envelope_max_power(env.min_h[i], env.max_h[i], e));
  }
  return out;
}

}  // namespace lqp
