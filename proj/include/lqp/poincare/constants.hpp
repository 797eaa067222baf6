#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "lqp/core/quadrature.hpp"
#include "lqp/forms/norms.hpp"
#include "lqp/forms/weight.hpp"
#include "lqp/homotopy/averaged.hpp"
#include "lqp/poincare/estimate.hpp"

namespace lqp {

enum class Moment { none, radius };

struct ConstantOptions {
  /// graded t-rule: panels x order Gauss nodes in u, t = 1 - (1-u)^grading
  int panels = 48;
  int order = 6;
  double grading = 3.0;
  /// closed forms for constant and single-axis weights; false forces the lattice search
  bool closed_form = true;
  /// false skips the symbolic endpoint test and integrates up to 1 - 1e-300
  bool symbolic = true;
  /// points per axis of the local refinement after the lattice search
  int refine_points = 5;
};

/// Regime gate 1/p - 1/q < (q-1)/(q(n+1)).
inline bool regime_gate(double p, double q, int n) { return 1.0 / p - 1.0 / q < (q - 1.0) / (q * (n + 1)); }

namespace detail {

/// Weights w with sum_i w_i g_i = int_s^e of the piecewise-linear interpolant of g.
inline void window_weights(const Axis& ax, double s, double e, std::vector<double>& w) {
  const std::size_t n = ax.count;
  w.assign(n, 0.0);
  if (!(e > s)) return;
  const double h = ax.spacing();
  const auto lo_cell = static_cast<std::ptrdiff_t>(std::floor((s - ax.lo) / h));
  const auto hi_cell = static_cast<std::ptrdiff_t>(std::ceil((e - ax.lo) / h));
  const std::size_t i0 = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(lo_cell, 0, static_cast<std::ptrdiff_t>(n) - 2));
  const std::size_t i1 = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(hi_cell, 1, static_cast<std::ptrdiff_t>(n) - 1));
  for (std::size_t i = i0; i < i1; ++i) {
    const double xl = ax.coordinate(i), xr = ax.coordinate(i + 1);
    const double u = std::max(s, xl), v = std::min(e, xr);
    if (!(v > u)) continue;
    w[i] += ((xr - u) * (xr - u) - (xr - v) * (xr - v)) / (2.0 * h);
    w[i + 1] += ((v - xl) * (v - xl) - (u - xl) * (u - xl)) / (2.0 * h);
  }
}

/// Length of the x-window {x in [lo,hi] : z in t x + (1-t)[lo,hi]} maximised over z.
inline double window_length(const Axis& ax, double t, double omt) {
  if (t <= 0.0) return ax.length();
  return std::min(ax.length(), omt / t * ax.length());
}

inline std::vector<double> window_starts(const Axis& ax, double len, std::size_t count) {
  const double span = ax.hi - len - ax.lo;
  if (span <= 1e-15 * ax.length() || count < 2) return {ax.lo};
  std::vector<double> s(count);
  for (std::size_t i = 0; i < count; ++i) s[i] = ax.lo + span * static_cast<double>(i) / static_cast<double>(count - 1);
  return s;
}

/// max over tensor windows of sum_j prod_a W_a[s_a][j_a] g[j], contracting one axis at a time.
inline double max_window_integral(const Grid& g, const std::vector<double>& field,
                                  const std::vector<std::vector<double>>& starts, const std::vector<double>& lengths,
                                  std::vector<double>* best_starts) {
  const int d = g.dim();
  double best = -1.0;
  std::vector<double> current(static_cast<std::size_t>(d));
  std::vector<double> w;
  std::function<void(int, const std::vector<double>&)> rec = [&](int a, const std::vector<double>& A) {
    const std::size_t na = g.count(a), rest = A.size() / na;
    for (double s : starts[static_cast<std::size_t>(a)]) {
      window_weights(g.axis(a), s, s + lengths[static_cast<std::size_t>(a)], w);
      std::vector<double> B(rest, 0.0);
      for (std::size_t i = 0; i < na; ++i) {
        if (w[i] == 0.0) continue;
        const double* src = A.data() + i * rest;
        for (std::size_t r = 0; r < rest; ++r) B[r] += w[i] * src[r];
      }
      current[static_cast<std::size_t>(a)] = s;
      if (a + 1 == d) {
        if (B[0] > best) {
          best = B[0];
          if (best_starts) *best_starts = current;
        }
      } else {
        rec(a + 1, B);
      }
    }
  };
  rec(0, field);
  return best;
}

/// int_s^e c^q (b - x)^(-lambda q) dx
inline double power_window_integral(const WeightProfile::PowerLaw& pl, double q, double s, double e) {
  const double m = pl.lambda * q;
  const double cq = std::pow(pl.scale, q);
  const double u0 = pl.b - s, u1 = pl.b - e;
  if (u1 <= 0.0) {
    if (m >= 1.0) return std::numeric_limits<double>::infinity();
    return cq * std::pow(u0, 1.0 - m) / (1.0 - m);
  }
  if (m == 1.0) return cq * std::log(u0 / u1);
  return cq * (std::pow(u0, 1.0 - m) - std::pow(u1, 1.0 - m)) / (1.0 - m);
}

/// sup_z int over the indicator box of (beta m)^q, i.e. S(t)^q.
inline double sup_indicator_power(const Grid& D, const WeightProfile& beta, double q, double t, double omt,
                                  Moment moment, const ConstantOptions& opt) {
  const int d = D.dim();
  std::vector<double> len(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) len[static_cast<std::size_t>(a)] = window_length(D.axis(a), t, omt);
  if (beta.is_constant() && beta.constant_value() == 0.0) return 0.0;
  if (opt.closed_form && moment == Moment::none && beta.single_axis()) {
    if (beta.is_constant()) {
      double vol = 1.0;
      for (double l : len) vol *= l;
      return std::pow(beta.constant_value(), q) * vol;
    }
    const int j = beta.axis();
    double other = 1.0;
    for (int a = 0; a < d; ++a)
      if (a != j) other *= len[static_cast<std::size_t>(a)];
    const Axis& ax = D.axis(j);
    const double lj = len[static_cast<std::size_t>(j)];
    if (const auto& pl = beta.power()) {
      // monotone along the axis: the best window sits at the end where beta is largest
      const double s = pl->lambda >= 0.0 ? ax.hi - lj : ax.lo;
      return other * power_window_integral(*pl, q, s, s + lj);
    }
    std::vector<double> gq(ax.count);
    for (std::size_t i = 0; i < ax.count; ++i) gq[i] = std::pow(beta.at(ax.coordinate(i), d), q);
    const Grid line({ax});
    std::vector<double> best;
    const auto starts = window_starts(ax, lj, ax.count);
    double v = max_window_integral(line, gq, {starts}, {lj}, &best);
    if (starts.size() > 1) {
      const double step = starts[1] - starts[0];
      std::vector<double> refine;
      for (int r = 0; r < opt.refine_points; ++r) {
        const double s = best[0] - step + 2.0 * step * r / std::max(1, opt.refine_points - 1);
        refine.push_back(std::clamp(s, ax.lo, ax.hi - lj));
      }
      v = std::max(v, max_window_integral(line, gq, {refine}, {lj}, nullptr));
    }
    return other * v;
  }
  // general lattice search over window starts on the D-grid
  const auto b = beta.sample(D);
  std::vector<double> gq(D.size());
  for (std::size_t i = 0; i < D.size(); ++i) {
    double m = 1.0;
    if (moment == Moment::radius) {
      double r2 = 0.0;
      for (int a = 0; a < d; ++a) r2 += D.coordinate(i, a) * D.coordinate(i, a);
      m = std::sqrt(r2);
    }
    const double v = b[i] * m;
    if (std::isfinite(v)) {
      gq[i] = std::pow(std::abs(v), q);
      continue;
    }
    const auto& pl = beta.power();
    if (!pl) throw DomainError("weight is singular on the grid; use a power-law profile");
    // integrable singularity at a node: use the exact average over the adjoining half cell
    const double h = 0.5 * D.axis(pl->axis).spacing();
    const double x = D.coordinate(i, pl->axis);
    const double avg = power_window_integral(*pl, q, x - h, x) / h;
    if (!std::isfinite(avg)) throw DomainError("weight is not q-integrable at its singular face");
    gq[i] = avg * std::pow(m, q);
  }
  std::vector<std::vector<double>> starts(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a)
    starts[static_cast<std::size_t>(a)] = window_starts(D.axis(a), len[static_cast<std::size_t>(a)], D.count(a));
  std::vector<double> best;
  double v = max_window_integral(D, gq, starts, len, &best);
  std::vector<std::vector<double>> refine(static_cast<std::size_t>(d));
  bool any = false;
  for (int a = 0; a < d; ++a) {
    const auto& st = starts[static_cast<std::size_t>(a)];
    if (st.size() < 2) {
      refine[static_cast<std::size_t>(a)] = st;
      continue;
    }
    any = true;
    const double step = st[1] - st[0];
    const Axis& ax = D.axis(a);
    for (int r = 0; r < opt.refine_points; ++r) {
      const double s = best[static_cast<std::size_t>(a)] - step + 2.0 * step * r / std::max(1, opt.refine_points - 1);
      refine[static_cast<std::size_t>(a)].push_back(std::clamp(s, ax.lo, ax.hi - len[static_cast<std::size_t>(a)]));
    }
  }
  if (any) v = std::max(v, max_window_integral(D, gq, refine, len, nullptr));
  return v;
}

struct TNode {
  double t, omt, w;
};

inline std::vector<TNode> graded_nodes(const ConstantOptions& opt) {
  // panel break at t = 1/2, where min(t, 1-t) has its kink
  const double u_half = 1.0 - std::pow(0.5, 1.0 / opt.grading);
  const int left = std::max(1, static_cast<int>(std::lround(opt.panels * u_half)));
  std::vector<TNode> out;
  for (const auto& u : {composite_gauss_legendre(left, opt.order, 0.0, u_half),
                        composite_gauss_legendre(std::max(1, opt.panels - left), opt.order, u_half, 1.0)}) {
    for (std::size_t i = 0; i < u.nodes.size(); ++i) {
      const double s = 1.0 - u.nodes[i];
      const double omt = std::pow(s, opt.grading);
      out.push_back({1.0 - omt, omt, u.weights[i] * opt.grading * std::pow(s, opt.grading - 1.0)});
    }
  }
  return out;
}

/// Nodes for the blow-up probe: 1 - t = e^{-sigma}, sigma in [0, ln 1e300].
inline std::vector<TNode> probe_nodes() {
  const double smax = 300.0 * std::log(10.0);
  const auto r = composite_gauss_legendre(240, 8, 0.0, smax);
  std::vector<TNode> out;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const double omt = std::exp(-r.nodes[i]);
    out.push_back({-std::expm1(-r.nodes[i]), omt, r.weights[i] * omt});
  }
  return out;
}

}  // namespace detail

/// S(t) = sup_{z in D} || beta(x) m(x) 1_{t x + (1-t) D}(z) ||_{L^q(D, dx)} on a box D,
/// with m = 1 or |x|. Limits: t = 0 gives the full-domain norm, t = 1 gives 0.
inline double sup_indicator_norm(const Grid& D, const WeightProfile& beta, double q, double t,
                                 Moment moment = Moment::none, const ConstantOptions& opt = {}) {
  if (!(q >= 1.0)) throw DomainError("L^q exponent must be >= 1");
  for (const auto& ax : D.axes())
    if (ax.periodic) throw DomainError("sup_indicator_norm needs a box domain");
  if (t >= 1.0) return 0.0;
  const double tt = std::max(t, 0.0);
  return std::pow(detail::sup_indicator_power(D, beta, q, tt, 1.0 - tt, moment, opt), 1.0 / q);
}

/// Exponent e with S(t) (1-t)^{-n/p} ~ (1-t)^e as t -> 1, and whether beta^q fails to be integrable.
struct EndpointExponent {
  double e = 0.0;
  bool weight_not_integrable = false;
};

inline EndpointExponent endpoint_exponent(const Grid& D, const WeightProfile& beta, double p, double q) {
  const int n = D.dim();
  EndpointExponent r{n / q - n / p, false};
  if (const auto& pl = beta.power()) {
    const Axis& ax = D.axis(pl->axis);
    if (pl->b <= ax.hi && pl->lambda > 0.0) {
      r.weight_not_integrable = pl->lambda * q >= 1.0;
      r.e -= pl->lambda;
    }
  }
  return r;
}

/// C = int_0^1 S(t) t^k (1-t)^{-n/p} dt with n = dim D; the radius moment gives C_2.
inline Estimate C_integral(const Grid& D, const WeightProfile& beta, int k, double p, double q,
                           Moment moment = Moment::none, const ConstantOptions& opt = {}) {
  if (!(q >= p && p >= 1.0)) throw DomainError("constants need q >= p >= 1");
  if (beta.is_constant() && beta.constant_value() == 0.0) return Estimate::finite(0.0);
  const int n = D.dim();
  if (opt.symbolic) {
    const auto ex = endpoint_exponent(D, beta, p, q);
    if (ex.weight_not_integrable) return Estimate::diverges("beta^q is not integrable at its singular face");
    if (ex.e <= -1.0) return Estimate::diverges("endpoint exponent at t = 1 is <= -1 (1/p - 1/q >= 1/n)");
  }
  const auto nodes = opt.symbolic ? detail::graded_nodes(opt) : detail::probe_nodes();
  double sum = 0.0;
  for (const auto& nd : nodes) {
    const double S = std::pow(detail::sup_indicator_power(D, beta, q, nd.t, nd.omt, moment, opt), 1.0 / q);
    if (S == 0.0) continue;
    sum += nd.w * S * std::pow(nd.t, k) * std::pow(nd.omt, -n / p);
  }
  if (!opt.symbolic && !(sum <= divergence_threshold))
    return {sum, true, {"quadrature exceeds the divergence threshold"}};
  return Estimate::finite(sum);
}

/// |D|^{1/q} int_0^1 t^{k-n/q} (1-t)^{-n/p} min(t^{n/q}, (1-t)^{n/q}) dt on the same graded nodes.
inline Estimate box_constant_bound(const Grid& D, int k, double p, double q, const ConstantOptions& opt = {}) {
  const int n = D.dim();
  if (n / q - n / p <= -1.0) return Estimate::diverges("endpoint exponent at t = 1 is <= -1 (1/p - 1/q >= 1/n)");
  double sum = 0.0;
  for (const auto& nd : detail::graded_nodes(opt)) {
    // t^{-n/q} min(t, 1-t)^{n/q} written as min(1, (1-t)/t)^{n/q} to keep t -> 0 finite
    sum += nd.w * std::pow(nd.t, k) * std::pow(nd.omt, -n / p) * std::pow(std::min(1.0, nd.omt / nd.t), n / q);
  }
  return Estimate::finite(std::pow(D.volume(), 1.0 / q) * sum);
}

/// Q = ||gamma^{-1}||_{L^r(D)}, r = p pbar / (p - pbar), r = inf when pbar = p.
inline Estimate Q_factor(const WeightProfile& gamma, double p, double pbar, const Grid& D, bool symbolic = true) {
  if (!(pbar >= 1.0 && pbar <= p)) throw DomainError("Q_factor needs 1 <= pbar <= p");
  const double r = pbar == p ? std::numeric_limits<double>::infinity() : p * pbar / (p - pbar);
  if (const auto& pl = gamma.power()) {
    // gamma^{-1} = (b - x)^{lambda} / scale
    const Axis& ax = D.axis(pl->axis);
    double other = 1.0;
    for (int a = 0; a < D.dim(); ++a)
      if (a != pl->axis) other *= D.axis(a).length();
    const bool singular = pl->b <= ax.hi && pl->lambda < 0.0;
    const double mu = pl->lambda;
    if (std::isinf(r)) {
      if (singular) return Estimate::diverges("gamma^{-1} is unbounded");
      return Estimate::finite(std::max(std::pow(pl->b - ax.lo, mu), std::pow(pl->b - ax.hi, mu)) / pl->scale);
    }
    if (symbolic) {
      if (singular && mu * r <= -1.0) return Estimate::diverges("gamma^{-1} is not in L^r");
      WeightProfile::PowerLaw inv{pl->b, -mu, 1.0, pl->axis};
      const double I = detail::power_window_integral(inv, r, ax.lo, ax.hi);
      return Estimate::finite(std::pow(other * I, 1.0 / r) / pl->scale);
    }
    // blow-up probe: integrate up to b - 1e-300 (b - lo) in log variables
    const double L = std::min(pl->b, ax.hi) - ax.lo;
    const auto rule = composite_gauss_legendre(240, 8, 0.0, 300.0 * std::log(10.0));
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double dist = L * std::exp(-rule.nodes[i]) + (pl->b - std::min(pl->b, ax.hi));
      sum += rule.weights[i] * L * std::exp(-rule.nodes[i]) * std::pow(dist, mu * r);
    }
    const double v = std::pow(other * sum, 1.0 / r) / pl->scale;
    if (!(v <= divergence_threshold)) return {v, true, {"quadrature exceeds the divergence threshold"}};
    return Estimate::finite(v);
  }
  const auto g = gamma.sample(D);
  std::vector<double> inv(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g[i] > 0.0)) return Estimate::diverges("gamma vanishes on the grid");
    inv[i] = 1.0 / g[i];
  }
  const double v = field_lp_norm(D, inv, r);
  if (!std::isfinite(v)) return Estimate::diverges("gamma^{-1} is not in L^r");
  return Estimate::finite(v);
}

/// ||beta||_{L^q([a,b))} for a profile depending on t = axis 0 only.
inline Estimate t_profile_norm(const WeightProfile& beta, const Axis& t_axis, double q, bool times_t, int dim) {
  if (!beta.single_axis() || (beta.axis() > 0)) throw DomainError("beta must depend on t only");
  if (const auto& pl = beta.power(); pl && pl->b <= t_axis.hi && pl->lambda > 0.0) {
    if (pl->lambda * q >= 1.0) return Estimate::diverges(times_t ? "||t beta(t)||_{L^q} diverges" : "||beta||_{L^q} diverges");
    if (!times_t) return Estimate::finite(std::pow(detail::power_window_integral(*pl, q, t_axis.lo, t_axis.hi), 1.0 / q));
    // t^q (b - t)^{-lambda q} on a graded rule towards b
    const double L = t_axis.hi - t_axis.lo, m = pl->lambda * q;
    const auto u = composite_gauss_legendre(64, 8, 0.0, 1.0);
    double s = 0.0;
    for (std::size_t i = 0; i < u.nodes.size(); ++i) {
      // x = b - L (1-u)^{g}, g chosen so the singular factor becomes smooth
      const double g = 1.0 / (1.0 - m);
      const double v = 1.0 - u.nodes[i];
      const double dist = L * std::pow(v, g);
      const double t = pl->b - dist;
      s += u.weights[i] * L * g * std::pow(v, g - 1.0) * std::pow(std::abs(t), q) * std::pow(pl->scale, q) * std::pow(dist, -m);
    }
    return Estimate::finite(std::pow(s, 1.0 / q));
  }
  const auto rule = composite_gauss_legendre(64, 8, t_axis.lo, t_axis.hi);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = rule.nodes[i];
    const double v = beta.at(t, dim) * (times_t ? std::abs(t) : 1.0);
    s += rule.weights[i] * std::pow(std::abs(v), q);
  }
  if (!std::isfinite(s)) return Estimate::diverges(times_t ? "||t beta(t)||_{L^q} diverges" : "||beta||_{L^q} diverges");
  return Estimate::finite(std::pow(s, 1.0 / q));
}

/// Parameters of the weighted Poincare constants.
struct ConstantRequest {
  int k = 1;
  double p = 2.0, q = 2.0, p_bar = 2.0;
  /// fiber dimension; the domain D = [a,b) x U has dimension n + 1
  int n = 1;
  std::shared_ptr<const DomainSpec> D;
  WeightProfile alpha = WeightProfile::constant(1.0);
  WeightProfile beta = WeightProfile::constant(1.0);
  WeightProfile gamma = WeightProfile::constant(1.0);
};

/// ||alpha|y| ||_{p'} C_1 + ||alpha||_{p'} C_2 with C_i using t^{k_power}.
struct AssembledConstant {
  Estimate C1, C2, C;
  double alpha_norm = 0.0, alpha_moment_norm = 0.0;
};

inline AssembledConstant assembled_constant(const Grid& D, const WeightProfile& alpha, const WeightProfile& beta,
                                            int k_power, double p, double q, const ConstantOptions& opt = {}) {
  AssembledConstant out;
  out.C1 = C_integral(D, beta, k_power, p, q, Moment::none, opt);
  out.C2 = C_integral(D, beta, k_power, p, q, Moment::radius, opt);
  const auto adm = check_admissible_weight(alpha, D, p, std::numeric_limits<double>::infinity());
  // rescale alpha to unit discrete mass, as the averaged homotopy does
  const double mass = adm.mass;
  out.alpha_norm = adm.norm / mass;
  out.alpha_moment_norm = adm.moment_norm / mass;
  out.C.hypothesis_failures = out.C1.hypothesis_failures;
  for (const auto& f : out.C2.hypothesis_failures) out.C.hypothesis_failures.push_back("C_2: " + f);
  for (const auto& v : adm.violations)
    if (v.find("unit mass") == std::string::npos) out.C.hypothesis_failures.push_back(v);
  if (out.C1.divergent || out.C2.divergent || !std::isfinite(out.alpha_norm) || !std::isfinite(out.alpha_moment_norm)) {
    out.C.divergent = true;
    out.C.value = std::numeric_limits<double>::infinity();
  } else {
    out.C.value = out.alpha_moment_norm * out.C1.value + out.alpha_norm * out.C2.value;
  }
  return out;
}

struct CylinderConstantReport {
  bool gate = false;
  Estimate beta_norm;
  Estimate t_beta_norm;
  /// |U|^{1/q} ||beta||_{L^q([a,b))}
  Estimate fiber_bound;
  /// fiber_bound times int_0^1 t^{k-n/q} (1-t)^{-(n+1)/p} min(t^{n/q}, (1-t)^{n/q}) dt
  Estimate bound;
  AssembledConstant assembled;
  /// ||gamma^{-1}||_{L^{p pbar/(p-pbar)}} over D
  Estimate q_factor;
  std::vector<std::string> hypothesis_failures;

  Json to_json() const {
    return {{"gate", gate},
            {"q_factor", q_factor.to_json()},
            {"beta_norm", beta_norm.to_json()},
            {"t_beta_norm", t_beta_norm.to_json()},
            {"fiber_bound", fiber_bound.to_json()},
            {"bound", bound.to_json()},
            {"C1", assembled.C1.to_json()},
            {"C2", assembled.C2.to_json()},
            {"C", assembled.C.to_json()},
            {"alpha_norm", assembled.alpha_norm},
            {"alpha_moment_norm", assembled.alpha_moment_norm},
            {"hypothesis_failures", hypothesis_failures}};
  }
};

/// Constants on D = [a,b) x U for a t-only beta.
inline CylinderConstantReport cylinder_constant(const ConstantRequest& req, const ConstantOptions& opt = {}) {
  if (!req.D) throw DomainError("constant request needs a domain");
  const Grid& D = req.D->grid();
  if (D.dim() != req.n + 1) throw DomainError("domain dimension must be n + 1");
  if (!(req.q >= req.p && req.p >= 1.0)) throw DomainError("constants need q >= p >= 1");
  CylinderConstantReport r;
  r.gate = regime_gate(req.p, req.q, req.n);
  if (!r.gate) r.hypothesis_failures.push_back("1/p - 1/q < (q-1)/(q(n+1))");
  const Axis& ta = D.axis(0);
  r.beta_norm = t_profile_norm(req.beta, ta, req.q, false, D.dim());
  r.t_beta_norm = t_profile_norm(req.beta, ta, req.q, true, D.dim());
  for (const auto* e : {&r.beta_norm, &r.t_beta_norm})
    for (const auto& f : e->hypothesis_failures) r.hypothesis_failures.push_back(f);
  double U = 1.0;
  for (int a = 1; a < D.dim(); ++a) U *= D.axis(a).length();
  if (r.beta_norm.divergent) {
    r.fiber_bound = r.beta_norm;
    r.bound = r.beta_norm;
  } else {
    r.fiber_bound = Estimate::finite(std::pow(U, 1.0 / req.q) * r.beta_norm.value);
    const double n = req.n, p = req.p, q = req.q;
    if (n / q - (n + 1) / p <= -1.0) {
      r.bound = Estimate::diverges("t-integral diverges at t = 1 (regime gate fails)");
    } else {
      double s = 0.0;
      for (const auto& nd : detail::graded_nodes(opt))
        s += nd.w * std::pow(nd.t, req.k) * std::pow(nd.omt, -(n + 1) / p) * std::pow(std::min(1.0, nd.omt / nd.t), n / q);
      r.bound = Estimate::finite(r.fiber_bound.value * s);
    }
  }
  r.assembled = assembled_constant(D, req.alpha, req.beta, req.k, req.p, req.q, opt);
  for (const auto& f : r.assembled.C.hypothesis_failures) r.hypothesis_failures.push_back(f);
  r.q_factor = Q_factor(req.gamma, req.p, req.p_bar, D);
  for (const auto& f : r.q_factor.hypothesis_failures) r.hypothesis_failures.push_back("Q: " + f);
  return r;
}

}  // namespace lqp
