#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lqp/io/json_io.hpp"
#include "lqp/vanishing/exponents.hpp"

namespace lqp {

/// Interval of q, bounds +inf when absent.
struct QInterval {
  bool empty = true;
  Rational lo{0};
  bool lo_closed = false;
  std::optional<Rational> hi;
  bool hi_closed = false;

  std::string str() const {
    if (empty) return "empty";
    return std::string(lo_closed ? "[" : "(") + to_string(lo) + ", " + (hi ? to_string(*hi) : "inf") +
           (hi && hi_closed ? "]" : ")");
  }
  bool contains(const Rational& q) const {
    if (empty) return false;
    if (lo_closed ? q < lo : q <= lo) return false;
    if (hi && (hi_closed ? q > *hi : q >= *hi)) return false;
    return true;
  }
};

/// Power-law region of the sphere examples, in x = 1/p, y = 1/q:
///   (k-2+alpha)/n < y <= x < (k-beta)/n,   p <= q < np/(n+1-p),   alpha + beta <= 2,
/// for finite b. With b = inf the region is empty.
class AdmissibleRegion {
 public:
  AdmissibleRegion(int n, int k, ExtRational alpha, ExtRational beta, bool b_finite = true)
      : n_(n), k_(k), alpha_(alpha), beta_(beta), b_finite_(b_finite) {
    if (n < 1) throw DomainError("fiber dimension must be >= 1");
    if (!b_finite_) reasons_.push_back("b = inf: the integrability inequalities cannot hold simultaneously");
    if (alpha_.infinite || beta_.infinite) {
      reasons_.push_back("alpha + beta <= 2 fails (infinite exponent)");
    } else {
      if (alpha_.value + beta_.value > Rational(2)) reasons_.push_back("alpha + beta <= 2 fails");
      // nonempty iff max(L, 0) < min(U, 1) in y = 1/q
      const Rational lo = std::max(lower(), Rational(0)), hi = std::min(upper(), Rational(1));
      if (reasons_.empty() && !(lo < hi)) reasons_.push_back("no (1/p, 1/q) satisfies (k-2+alpha)/n < 1/q <= 1/p < (k-beta)/n with p >= 1");
    }
  }

  int n() const { return n_; }
  int k() const { return k_; }
  const ExtRational& alpha() const { return alpha_; }
  const ExtRational& beta() const { return beta_; }
  bool b_finite() const { return b_finite_; }
  bool empty() const { return !reasons_.empty(); }
  const std::vector<std::string>& reasons() const { return reasons_; }

  /// (k-2+alpha)/n and (k-beta)/n
  Rational lower() const { return (Rational(k_ - 2) + alpha_.value) / Rational(n_); }
  Rational upper() const { return (Rational(k_) - beta_.value) / Rational(n_); }

  bool contains(const Rational& p, const Rational& q) const {
    if (empty() || p < Rational(1)) return false;
    const Rational x = Rational(1) / p, y = Rational(1) / q;
    return lower() < y && y <= x && x < upper() && p <= q && gate(p, q);
  }

  /// Smallest distance of (1/p, 1/q) to a constraint boundary.
  double boundary_gap(const Rational& p, const Rational& q) const {
    if (alpha_.infinite || beta_.infinite) return INFINITY;
    const Rational x = Rational(1) / p, y = Rational(1) / q, n1(n_ + 1), nn(n_);
    const Rational gaps[] = {y - lower(), x - y, upper() - x, Rational(1) - (n1 * x - nn * y)};
    double g = INFINITY;
    for (const auto& v : gaps) g = std::min(g, std::abs(to_double(v)));
    return g;
  }

  /// For fixed p, the q with (p, q) in the region.
  QInterval q_interval(const Rational& p) const {
    QInterval out;
    if (empty() || p < Rational(1)) return out;
    const Rational x = Rational(1) / p;
    if (!(x < upper())) return out;
    out.lo = p;  // q >= p
    out.lo_closed = true;
    auto cap = [&](const Rational& v) {
      if (!out.hi || v < *out.hi) out.hi = v;
    };
    if (lower() > Rational(0)) cap(Rational(1) / lower());  // 1/q > L
    const Rational den = Rational(n_ + 1) - p;
    if (den > Rational(0)) cap(Rational(n_) * p / den);  // gate
    out.empty = out.hi && !(out.lo < *out.hi);
    if (!out.empty && lower() >= x) out.empty = true;
    return out;
  }

  Json to_json() const {
    Json j{{"n", n_},
           {"k", k_},
           {"alpha", alpha_.str()},
           {"beta", beta_.str()},
           {"b_finite", b_finite_},
           {"empty", empty()},
           {"reasons", reasons_},
           {"constraints",
            {"(k-2+alpha)/n < 1/q <= 1/p < (k-beta)/n", "p <= q < np/(n+1-p)", "alpha + beta <= 2"}}};
    if (!alpha_.infinite && !beta_.infinite) {
      j["lower_inv_q"] = to_string(lower());
      j["upper_inv_p"] = to_string(upper());
    }
    return j;
  }

 private:
  bool gate(const Rational& p, const Rational& q) const {
    return Rational(1) / p - Rational(1) / q < (q - 1) / (q * Rational(n_ + 1));
  }

  int n_;
  int k_;
  ExtRational alpha_;
  ExtRational beta_;
  bool b_finite_;
  std::vector<std::string> reasons_;
};

inline AdmissibleRegion admissible_region(int n, int k, const ExponentSummary& ex, bool b_finite = true) {
  return AdmissibleRegion(n, k, ex.alpha, ex.beta, b_finite);
}

/// Samples 1/p, 1/q = i/resolution (i = 1..resolution) for every nonempty region; rows ordered by
/// k, then 1/p, then 1/q. `fixed_p` restricts to one p. Empty regions contribute no rows.
inline void emit_region_csv(std::ostream& os, const std::vector<AdmissibleRegion>& regions, int resolution,
                            std::optional<Rational> fixed_p = std::nullopt) {
  if (resolution < 1) throw DomainError("region resolution must be >= 1");
  os << "inv_p,inv_q,k,verdict\n";
  char buf[64];
  auto num = [&](const Rational& r) {
    std::snprintf(buf, sizeof buf, "%.17g", to_double(r));
    return std::string(buf);
  };
  for (const auto& reg : regions) {
    if (reg.empty()) continue;
    std::vector<Rational> xs;
    if (fixed_p) xs.push_back(Rational(1) / *fixed_p);
    else
      for (int i = 1; i <= resolution; ++i) xs.emplace_back(i, resolution);
    for (const auto& x : xs) {
      for (int j = 1; j <= resolution; ++j) {
        const Rational y(j, resolution);
        const bool in = reg.contains(Rational(1) / x, Rational(1) / y);
        os << num(x) << ',' << num(y) << ',' << reg.k() << ',' << (in ? "member" : "non-member") << '\n';
      }
    }
  }
}

}  // namespace lqp
