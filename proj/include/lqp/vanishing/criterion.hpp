#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lqp/core/quadrature.hpp"
#include "lqp/forms/cylinder.hpp"
#include "lqp/io/json_io.hpp"
#include "lqp/vanishing/exponents.hpp"

namespace lqp {

enum class Verdict { vanishes, conditional, hypotheses_fail };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::vanishes: return "VANISHES";
    case Verdict::conditional: return "CONDITIONAL";
    case Verdict::hypotheses_fail: return "HYPOTHESES-FAIL";
  }
  return "?";
}

/// Caller-supplied knowledge of H^k_DR of the fiber (or of X for asymptotic cylinders).
enum class DeRham { zero, nonzero, unknown };

/// H^k_DR(S^n) = 0 unless k = 0 or k = n.
inline DeRham sphere_de_rham(int n, int k) { return k == 0 || k == n ? DeRham::nonzero : DeRham::zero; }

/// s(t) = max_x h = (b-t)^(-lambda_s), g(t) = min_x h = (b-t)^(-lambda_g) on [a, b).
/// Without b the warp is t^lambda on [a, inf) (exact mode only).
struct PowerLawWarp {
  Rational lambda_s{2};
  Rational lambda_g{2};
  double a = 0.0;
  std::optional<double> b = 1.0;
};

struct CriterionInput {
  /// fiber dimension
  int n = 1;
  int k = 1;
  Rational p{2};
  Rational q{2};
  std::optional<PowerLawWarp> power;
  /// twisted cylinder with tabulated warp, used when `power` is empty
  DomainPtr sampled;
  DeRham de_rham = DeRham::unknown;
};

enum class CriterionMode { exact, numeric };

struct CriterionOptions {
  /// pbar grid over [1, p]; the last node is pbar = p (sup norm)
  int p_bar_nodes = 33;
  /// ratio test window: consecutive truncations b - 2^-j compared
  int truncations = 6;
  /// finest truncation level j
  int last_level = 26;
  /// divergent when the mean log2 increment ratio is >= -ratio_tol
  double ratio_tol = 1e-9;
  int gl_order = 16;
};

struct ConditionResult {
  std::string name;
  bool finite = false;
  /// the norm; +inf when divergent
  double value = 0.0;
  /// signed distance from the integrability threshold in exponent units (exact mode), NaN otherwise
  double margin = std::numeric_limits<double>::quiet_NaN();
};

struct VanishingReport {
  Verdict verdict = Verdict::hypotheses_fail;
  CriterionMode mode = CriterionMode::exact;
  /// dimension entering the gate (n + 1)
  int m = 0;
  bool q_ge_p = false;
  bool gate = false;
  std::vector<ConditionResult> conditions;
  std::optional<Rational> p_bar;
  std::vector<std::string> failed;
  DeRham de_rham = DeRham::unknown;
  std::vector<std::string> notes;

  bool hypotheses_hold() const { return failed.empty(); }

  Json to_json() const {
    Json conds = Json::array();
    for (const auto& c : conditions) {
      Json j{{"name", c.name}, {"finite", c.finite}};
      j["value"] = std::isfinite(c.value) ? Json(c.value) : Json(nullptr);
      j["margin"] = std::isnan(c.margin) ? Json(nullptr) : Json(c.margin);
      conds.push_back(j);
    }
    Json j{{"verdict", to_string(verdict)},
           {"mode", mode == CriterionMode::exact ? "exact" : "numeric"},
           {"m", m},
           {"q_ge_p", q_ge_p},
           {"gate", gate},
           {"conditions", conds},
           {"failed", failed},
           {"notes", notes}};
    j["de_rham"] = de_rham == DeRham::zero ? "zero" : de_rham == DeRham::nonzero ? "nonzero" : "unknown";
    if (p_bar) {
      j["p_bar"] = to_double(*p_bar);
      j["p_bar_exact"] = to_string(*p_bar);
    } else {
      j["p_bar"] = nullptr;
    }
    return j;
  }
};

namespace detail {

inline std::vector<Rational> p_bar_grid(const Rational& p, int nodes) {
  std::vector<Rational> out;
  if (p == Rational(1) || nodes <= 1) return {p};
  for (int i = 0; i < nodes; ++i) out.push_back(Rational(1) + (p - 1) * Rational(i, nodes - 1));
  return out;
}

/// r = p pbar / (p - pbar); nullopt stands for r = inf (pbar = p).
inline std::optional<Rational> dual_exponent(const Rational& p, const Rational& pbar) {
  if (pbar == p) return std::nullopt;
  return p * pbar / (p - pbar);
}

inline double log_sum_exp(double x, double y) {
  if (x == -INFINITY) return y;
  if (y == -INFINITY) return x;
  const double m = std::max(x, y);
  return m + std::log(std::exp(x - m) + std::exp(y - m));
}

/// log f(t, d) with d = b - t passed exactly
using LogProfile = std::function<double(double, double)>;

struct TruncationResult {
  bool finite = false;
  double value = 0.0;
};

/// ||f||_{L^r([a, b))} by truncation at b - 2^-j: integrals over dyadic pieces in d = b - t,
/// divergent when the piece integrals stop shrinking over the last `truncations` levels.
/// Everything is carried in log space.
inline TruncationResult truncated_norm(const LogProfile& logf, std::optional<double> r, double a, double b,
                                       const CriterionOptions& opt) {
  const double top = b - a;
  const int j0 = std::max(0, static_cast<int>(std::ceil(-std::log2(top))));
  const int j1 = std::max(opt.last_level, j0 + opt.truncations + 1);
  const QuadratureRule unit = gauss_legendre(opt.gl_order, 0.0, 1.0);
  std::vector<double> logs;  // per dyadic piece: log integral (r finite) or log sup (r = inf)
  double log_total = -INFINITY, log_sup = -INFINITY;
  auto piece = [&](double dlo, double dhi) {
    double acc = -INFINITY, sup = -INFINITY;
    for (std::size_t i = 0; i < unit.nodes.size(); ++i) {
      const double d = dlo + (dhi - dlo) * unit.nodes[i];
      const double lf = logf(b - d, d);
      sup = std::max(sup, lf);
      if (r) acc = log_sum_exp(acc, std::log(unit.weights[i] * (dhi - dlo)) + *r * lf);
    }
    for (double d : {dlo, dhi}) sup = std::max(sup, logf(b - d, d));
    log_sup = std::max(log_sup, sup);
    log_total = log_sum_exp(log_total, acc);
    return r ? acc : sup;
  };
  if (std::ldexp(1.0, -j0) < top) piece(std::ldexp(1.0, -j0), top);
  for (int j = j0; j < j1; ++j) logs.push_back(piece(std::ldexp(1.0, -(j + 1)), std::ldexp(1.0, -j)));
  double mean = 0.0;
  const std::size_t n = logs.size();
  for (std::size_t i = n - static_cast<std::size_t>(opt.truncations); i < n; ++i) {
    const double step = logs[i] - logs[i - 1];
    mean += std::isnan(step) ? -INFINITY : step;
  }
  mean /= opt.truncations * std::log(2.0);
  const bool finite = r ? mean < -opt.ratio_tol : mean <= opt.ratio_tol;
  if (!finite) return {false, INFINITY};
  if (!r) return {true, std::exp(log_sup)};
  // geometric tail beyond the last truncation
  const double rho = std::exp2(mean);
  if (logs.back() > -INFINITY) log_total = log_sum_exp(log_total, logs.back() + std::log(rho / (1.0 - rho)));
  return {true, std::exp(log_total / *r)};
}

/// Trapezoid L^r norm over tabulated t nodes.
inline TruncationResult tabulated_norm(const std::vector<double>& t, const std::vector<double>& logf, std::optional<double> r) {
  for (double v : logf)
    if (std::isnan(v) || v == INFINITY) return {false, INFINITY};
  if (!r) return {true, std::exp(*std::max_element(logf.begin(), logf.end()))};
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    s += 0.5 * (t[i + 1] - t[i]) * (std::exp(*r * logf[i]) + std::exp(*r * logf[i + 1]));
  if (!std::isfinite(s)) return {false, INFINITY};
  return {true, std::pow(s, 1.0 / *r)};
}

inline Rational max_of(std::initializer_list<Rational> xs) { return *std::max_element(xs.begin(), xs.end()); }

}  // namespace detail

/// max(F_{k-2,q}, F_{k-1,q}) in L^q and with the factor t, {min(f_{k-1,p}, f_{k,p})}^{-1} in
/// L^{p pbar/(p - pbar)} for some pbar in [1, p], the gate 1/p - 1/q < (q-1)/(q(n+1)), q >= p >= 1
/// and H^k_DR(N) = 0. With F_{l,q} = max_x h^{n/q-l}, f_{l,p} = min_x h^{n/p-l}.
/// Exact mode uses the singular exponents of power-law warps; numeric mode evaluates the norms.
inline VanishingReport criterion_check(const CriterionInput& in, CriterionMode mode = CriterionMode::exact,
                                       const CriterionOptions& opt = {}) {
  VanishingReport rep;
  rep.mode = mode;
  rep.m = in.n + 1;
  rep.de_rham = in.de_rham;
  const Rational n(in.n), k(in.k), p = in.p, q = in.q;
  if (in.n < 1) throw DomainError("fiber dimension must be >= 1");
  if (p <= Rational(0) || q <= Rational(0)) throw DomainError("p and q must be positive");
  rep.q_ge_p = q >= p && p >= Rational(1);
  if (!rep.q_ge_p) rep.failed.push_back("q >= p >= 1");
  rep.gate = Rational(1) / p - Rational(1) / q < (q - 1) / (q * (n + 1));
  if (!rep.gate) rep.failed.push_back("1/p - 1/q < (q-1)/(q(n+1))");

  // exponents of h in the profiles
  const Rational e1 = n / q - k + 2, e2 = e1 - 1;  // F_{k-2,q}, F_{k-1,q}
  const Rational d1 = n / p - k + 1, d2 = d1 - 1;  // f_{k-1,p}, f_{k,p}
  const auto pbars = detail::p_bar_grid(p, opt.p_bar_nodes);
  const std::string name1 = "||max(F_{k-2,q}, F_{k-1,q})||_{L^q} < inf";
  const std::string name2 = "||t max(F_{k-2,q}, F_{k-1,q})||_{L^q} < inf";
  const std::string name3 = "||{min(f_{k-1,p}, f_{k,p})}^{-1}||_{L^{p pbar/(p-pbar)}} < inf for some pbar in [1,p]";
  ConditionResult c1{name1}, c2{name2}, c3{name3};

  if (mode == CriterionMode::exact) {
    if (!in.power) throw DomainError("exact mode needs a power-law warp");
    const auto& w = *in.power;
    if (w.lambda_s < w.lambda_g) throw DomainError("s >= g requires lambda_s >= lambda_g");
    if (w.lambda_g <= Rational(0)) throw DomainError("power-law warp needs lambda > 0");
    if (w.b && !(w.a >= 0.0 && w.a < *w.b)) throw DomainError("power-law warp needs 0 <= a < b");
    if (!w.b && !(w.a > 0.0)) throw DomainError("power-law warp on [a, inf) needs a > 0");
    // growth exponent c of the profile: ~ (b-t)^(-c) at b, ~ t^c at inf
    const Rational cF = detail::max_of({w.lambda_s * e1, w.lambda_g * e1, w.lambda_s * e2, w.lambda_g * e2});
    const Rational cf = detail::max_of({-w.lambda_s * d1, -w.lambda_g * d1, -w.lambda_s * d2, -w.lambda_g * d2});
    if (w.b) {
      // (b-t)^(-c r) integrable iff c r < 1; t is bounded on [a, b)
      c1.margin = to_double(Rational(1) - q * cF);
      c2.margin = c1.margin;
      for (const auto& pb : pbars) {
        const auto r = detail::dual_exponent(p, pb);
        const bool ok = r ? *r * cf < Rational(1) : cf <= Rational(0);
        if (ok && !rep.p_bar) rep.p_bar = pb;
      }
      const auto r0 = detail::dual_exponent(p, pbars.front());
      c3.margin = to_double(r0 ? Rational(1) - *r0 * cf : -cf);
      c1.finite = c1.margin > 0;
      c2.finite = c1.finite;
    } else {
      // t^(c r) integrable at inf iff c r < -1, and t^(1 + c) in L^q iff q (1 + c) < -1
      c1.margin = to_double(Rational(-1) - q * cF);
      c2.margin = to_double(Rational(-1) - q * (cF + 1));
      for (const auto& pb : pbars) {
        const auto r = detail::dual_exponent(p, pb);
        const bool ok = r ? *r * cf < Rational(-1) : cf <= Rational(0);
        if (ok && !rep.p_bar) rep.p_bar = pb;
      }
      const auto r0 = detail::dual_exponent(p, pbars.front());
      c3.margin = to_double(r0 ? Rational(-1) - *r0 * cf : -cf);
      c1.finite = c1.margin > 0;
      c2.finite = c2.margin > 0;
    }
    c3.finite = rep.p_bar.has_value();
    for (auto* c : {&c1, &c2, &c3}) c->value = c->finite ? NAN : INFINITY;
  } else {
    const double qd = to_double(q);
    if (in.power) {
      const auto& w = *in.power;
      if (!w.b) throw DomainError("numeric mode needs a finite b; use exact mode for b = inf");
      if (!(w.a < *w.b)) throw DomainError("power-law warp needs a < b");
      const double ls = to_double(w.lambda_s), lg = to_double(w.lambda_g);
      const double E1 = to_double(e1), E2 = to_double(e2), D1 = to_double(d1), D2 = to_double(d2);
      // log s = -lambda_s log d, log g = -lambda_g log d
      auto logF = [=](double, double d) {
        const double L = -std::log(d);
        return std::max({E1 * ls * L, E1 * lg * L, E2 * ls * L, E2 * lg * L});
      };
      auto logtF = [=](double t, double d) { return std::log(std::abs(t)) + logF(t, d); };
      auto loginv = [=](double, double d) {
        const double L = -std::log(d);
        return std::max({-D1 * ls * L, -D1 * lg * L, -D2 * ls * L, -D2 * lg * L});
      };
      const auto r1 = detail::truncated_norm(logF, qd, w.a, *w.b, opt);
      const auto r2 = detail::truncated_norm(logtF, qd, w.a, *w.b, opt);
      c1.finite = r1.finite, c1.value = r1.value;
      c2.finite = r2.finite, c2.value = r2.value;
      for (const auto& pb : pbars) {
        const auto r = detail::dual_exponent(p, pb);
        const auto res = detail::truncated_norm(loginv, r ? std::optional<double>(to_double(*r)) : std::nullopt, w.a, *w.b, opt);
        if (res.finite) {
          rep.p_bar = pb;
          c3.value = res.value;
          break;
        }
      }
    } else {
      if (!in.sampled) throw DomainError("criterion input needs a power-law warp or a sampled twisted cylinder");
      if (in.sampled->fiber_dim() != in.n) throw DomainError("fiber dimension does not match the sampled domain");
      const auto env = fiber_envelope(*in.sampled);
      const std::size_t nt = env.t.size();
      std::vector<double> lF(nt), ltF(nt), linv(nt);
      const double E1 = to_double(e1), E2 = to_double(e2), D1 = to_double(d1), D2 = to_double(d2);
      for (std::size_t i = 0; i < nt; ++i) {
        const double lo = std::log(env.min_h[i]), hi = std::log(env.max_h[i]);
        lF[i] = std::max({E1 * lo, E1 * hi, E2 * lo, E2 * hi});
        ltF[i] = std::log(std::abs(env.t[i])) + lF[i];
        linv[i] = std::max({-D1 * lo, -D1 * hi, -D2 * lo, -D2 * hi});
      }
      const auto r1 = detail::tabulated_norm(env.t, lF, qd), r2 = detail::tabulated_norm(env.t, ltF, qd);
      c1.finite = r1.finite, c1.value = r1.value;
      c2.finite = r2.finite, c2.value = r2.value;
      for (const auto& pb : pbars) {
        const auto r = detail::dual_exponent(p, pb);
        const auto res = detail::tabulated_norm(env.t, linv, r ? std::optional<double>(to_double(*r)) : std::nullopt);
        if (res.finite) {
          rep.p_bar = pb;
          c3.value = res.value;
          break;
        }
      }
      rep.notes.push_back("tabulated warp: norms over the sampled t-range");
    }
    c3.finite = rep.p_bar.has_value();
    if (!c3.finite) c3.value = INFINITY;
  }
  rep.conditions = {c1, c2, c3};
  for (const auto& c : rep.conditions)
    if (!c.finite) rep.failed.push_back(c.name);
  if (in.de_rham == DeRham::nonzero) rep.failed.push_back("H^k_DR(N) = 0");
  if (!rep.failed.empty()) rep.verdict = Verdict::hypotheses_fail;
  else if (in.de_rham == DeRham::unknown) {
    rep.verdict = Verdict::conditional;
    rep.notes.push_back("conditional on H^k_DR(N)=0");
  } else {
    rep.verdict = Verdict::vanishes;
  }
  return rep;
}

/// Asymptotic twisted cylinder AC^h_{a,b} dX with dim M = m: the criterion for the fiber dX
/// (dimension m - 1) with the H^k_DR(X) flag in place of H^k_DR(N).
inline VanishingReport asymptotic_delegate(int m, CriterionInput in, DeRham de_rham_X,
                                           CriterionMode mode = CriterionMode::exact, const CriterionOptions& opt = {}) {
  if (m < 2) throw DomainError("asymptotic cylinder needs dimension >= 2");
  in.n = m - 1;
  in.de_rham = de_rham_X;
  auto rep = criterion_check(in, mode, opt);
  for (auto& f : rep.failed)
    if (f == "H^k_DR(N) = 0") f = "H^k_DR(X) = 0";
  for (auto& note : rep.notes)
    if (note == "conditional on H^k_DR(N)=0") note = "conditional on H^k_DR(X)=0";
  rep.notes.push_back("asymptotic twisted cylinder, m = " + std::to_string(m));
  return rep;
}

}  // namespace lqp
