#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lqp/cech/cochain.hpp"
#include "lqp/homotopy/averaged.hpp"
#include "lqp/poincare/constants.hpp"

namespace lqp {

struct GlueOptions {
  double p = 2.0;
  double q = 2.0;
  /// t-only weights on the target and source sides
  WeightProfile beta = WeightProfile::constant(1.0);
  WeightProfile gamma = WeightProfile::constant(1.0);
  HomotopyOptions homotopy;
  /// centre nodes per axis of the uniform averaging weight on each chart
  std::size_t y_nodes = 3;
  DerivativeOptions derivative;
  /// stage residuals relative to max |w|
  double stage_tolerance = 1e-6;
  /// nodes of the pbar search grid over [1, p]
  int p_bar_nodes = 33;
};

struct StageRecord {
  std::string name;
  /// max-norm defect of the stage equation, relative to max |w|
  double residual = 0.0;
  /// weighted cochain norm of the stage output over ||w||_{L^p(M, gamma)}
  double norm_ratio = 0.0;
};

struct GlueResult {
  GridForm xi;
  std::vector<StageRecord> stages;
  ConstantCorrection correction;
  /// max |d xi - w| / max |w|
  double residual = 0.0;
  /// ||xi||_{L^q(M, beta)} / ||w||_{L^p(M, gamma)}
  double norm_ratio = 0.0;
  std::optional<double> p_bar;
};

/// Verifies the hypotheses of the cylinder Sobolev-Poincare inequality; returns the pbar witness
/// or throws HypothesisFailure naming every failed condition.
inline double check_cylinder_hypotheses(const Axis& t_axis, int n, const GlueOptions& opt) {
  std::vector<std::string> failed;
  if (!(opt.q >= opt.p && opt.p >= 1.0)) failed.push_back("q >= p >= 1");
  else if (!regime_gate(opt.p, opt.q, n)) failed.push_back("1/p - 1/q < (q-1)/(q(n+1))");
  // the weights live on [a, b); a power law fixes b at its singular point
  auto interval_for = [&](const WeightProfile& w) {
    Axis ax = t_axis;
    if (const auto& pl = w.power(); pl && pl->b > ax.lo) ax.hi = pl->b;
    return ax;
  };
  const Axis tb = interval_for(opt.beta);
  const auto bn = t_profile_norm(opt.beta, tb, opt.q, false, 1);
  const auto tn = t_profile_norm(opt.beta, tb, opt.q, true, 1);
  if (bn.divergent) failed.push_back("||beta||_{L^q([a,b))} < inf (beta not in L^q)");
  if (tn.divergent) failed.push_back("||t beta(t)||_{L^q([a,b))} < inf");
  std::optional<double> witness;
  if (opt.p >= 1.0) {
    const Axis tg = interval_for(opt.gamma);
    const Grid line({Axis{tg.lo, tg.hi, std::max<std::size_t>(tg.count, 3), false}});
    const int m = std::max(1, opt.p_bar_nodes);
    for (int i = 0; i < m && !witness; ++i) {
      const double pb = m == 1 ? opt.p : 1.0 + (opt.p - 1.0) * i / (m - 1);
      if (!Q_factor(opt.gamma, opt.p, pb, line).divergent) witness = pb;
    }
    if (!witness) failed.push_back("||gamma^{-1}||_{L^{p pbar/(p-pbar)}} < inf for some pbar in [1,p]");
  }
  if (!failed.empty()) throw HypothesisFailure(failed);
  return *witness;
}

/// Primitive xi with d xi = w on a cylinder [a,b] x T^n via the Cech-de Rham descent:
/// xi^s_I = A_alpha((delta xi^{s-1})_I) on each chart, constant correction of delta xi^{k-1},
/// then x^{k-1} = S(xi^{k-1} - c), x^{k-r} = S(xi^{k-r} - d x^{k-r+1}), xi = x^0,
/// where S is the partition-of-unity inverse of delta.
inline GlueResult glue_primitive(const GridForm& w, const GoodCover& cover, const PartitionOfUnity& rho,
                                 const GlueOptions& opt = {}) {
  const int k = w.degree();
  if (k < 1) throw DomainError("gluing needs a form of degree >= 1");
  if (!w.domain().same_grid(cover.global())) throw DomainError("form does not live on the cover's cylinder");
  const Grid& g = w.grid();
  GlueResult out{GridForm(w.domain_ptr(), k - 1), {}, {}, 0.0, 0.0, std::nullopt};
  out.p_bar = check_cylinder_hypotheses(g.axis(0), cover.global().fiber_dim(), opt);

  const double scale = std::max(w.max_abs(), 1e-300);
  const double tol = opt.stage_tolerance;
  if (k < w.dim()) {
    const double closed = exterior_derivative(w, opt.derivative).max_abs() / scale;
    if (closed > std::max(tol, 1e-8)) throw HypothesisFailure({"omega is closed (max |d omega| / max |omega| = " + std::to_string(closed) + ")"});
  }
  const double w_norm = lp_norm(w, opt.p, Metric::euclidean, &opt.gamma);
  auto ratio = [&](double v) { return w_norm > 0.0 ? v / w_norm : 0.0; };
  auto record = [&](std::string name, double residual, double norm) {
    out.stages.push_back({name, residual, ratio(norm)});
    if (residual > tol) throw StageError(name, residual, tol);
  };

  // descend
  std::vector<CechCochain> xi;
  CechCochain delta_prev = restrict_global(cover, w);
  for (int s = 0; s < k; ++s) {
    CechCochain cur{k - s - 1, s + 1, {}};
    double res = 0.0;
    for (const auto& [I, target] : delta_prev.parts) {
      const std::vector<std::size_t> yg(static_cast<std::size_t>(g.dim()), opt.y_nodes);
      GridForm x = averaged_homotopy(target, WeightProfile::constant(1.0), yg, opt.homotopy);
      GridForm defect = exterior_derivative(x, opt.derivative) - target;
      res = std::max(res, defect.max_abs() / scale);
      cur.parts.emplace(I, std::move(x));
    }
    record("descend xi^" + std::to_string(s), res, cochain_norm(cur, opt.q, &opt.beta));
    delta_prev = coboundary(cover, cur);
    xi.push_back(std::move(cur));
  }

  // constants: delta xi^{k-1} is locally constant on level-(k+1) sets
  out.correction = constant_correction(cover, delta_prev);
  out.stages.push_back({"cocycle constancy", out.correction.spread / scale, 0.0});
  if (out.correction.residual / scale > std::max(tol, 1e-8))
    throw HypothesisFailure({"omega is exact (cover cocycle obstruction, residual " +
                             std::to_string(out.correction.residual / scale) + ")"});
  if (out.correction.spread / scale > tol) throw StageError("cocycle constancy", out.correction.spread / scale, tol);
  CechCochain lambda = xi[static_cast<std::size_t>(k - 1)];
  double c_norm = 0.0;
  for (auto& [I, f] : lambda.parts) {
    const double c = out.correction.c.at(I);
    for (double& v : f.field(0)) v -= c;
    GridForm cf(f.domain_ptr(), 0);
    std::fill(cf.field(0).begin(), cf.field(0).end(), c);
    c_norm += lp_norm(cf, opt.q, Metric::euclidean, &opt.beta);
  }
  out.stages.push_back({"constant correction", out.correction.residual / scale, ratio(c_norm)});

  // ascend
  auto solve_checked = [&](const CechCochain& target, const std::string& name) {
    CechCochain x = solve_coboundary(cover, rho, target);
    const CechCochain back = coboundary(cover, x) - target;
    record(name, back.max_abs() / scale, cochain_norm(x, opt.q, &opt.beta));
    return x;
  };
  CechCochain x = solve_checked(lambda, "ascend x^" + std::to_string(k - 1));
  for (int r = 2; r <= k; ++r)
    x = solve_checked(xi[static_cast<std::size_t>(k - r)] - cochain_derivative(x, opt.derivative), "ascend x^" + std::to_string(k - r));
  out.xi = x.parts.at(0);
  GridForm defect = exterior_derivative(out.xi, opt.derivative);
  defect -= w;
  out.residual = defect.max_abs() / scale;
  out.norm_ratio = ratio(lp_norm(out.xi, opt.q, Metric::euclidean, &opt.beta));
  out.stages.push_back({"final d xi = omega", out.residual, out.norm_ratio});
  if (out.residual > tol) throw StageError("final d xi = omega", out.residual, tol);
  return out;
}

}  // namespace lqp
