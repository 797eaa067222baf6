#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lqp/cech/glue.hpp"
#include "lqp/forms/trig_form.hpp"
#include "lqp/homotopy/averaged.hpp"
#include "lqp/homotopy/cone.hpp"
#include "lqp/io/json_io.hpp"
#include "lqp/poincare/constants.hpp"
#include "lqp/vanishing/criterion.hpp"
#include "lqp/vanishing/region.hpp"

namespace lqp::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_refused = 2;

struct RunOptions {
  std::string scenario;
  std::string out = ".";
  /// overrides the scenario's "grid_scale" (default 1)
  std::optional<double> grid_scale;
  std::optional<std::uint64_t> seed;
  bool strict = false;
};

/// Schema problem in a scenario file.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

namespace detail {

/// Refusal that still carries the partial report.
class Refused : public HypothesisFailure {
 public:
  Refused(std::vector<std::string> failed, Json details) : HypothesisFailure(std::move(failed)), details_(std::move(details)) {}
  const Json& details() const { return details_; }

 private:
  Json details_;
};

inline const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ScenarioError(std::string("scenario is missing '") + key + "'");
  return j.at(key);
}

template <class T>
T value_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ScenarioError(std::string("scenario field '") + key + "' has the wrong type");
  }
}

/// Number or "num/den" string.
inline Rational rational_field(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_number()) return rational_from_double(j.get<double>());
  throw ScenarioError("expected a number or a \"num/den\" string");
}

inline WeightProfile weight_field(const Json& j, const char* key) {
  if (!j.contains(key)) return WeightProfile::constant(1.0);
  const Json& w = j.at(key);
  if (w.is_number()) return WeightProfile::constant(w.get<double>());
  const std::string type = value_or<std::string>(w, "type", "constant");
  if (type == "constant") return WeightProfile::constant(value_or(w, "value", 1.0));
  if (type == "power_law")
    return WeightProfile::power_law(require(w, "b").get<double>(), require(w, "lambda").get<double>(),
                                    value_or(w, "scale", 1.0), value_or(w, "axis", 0));
  throw ScenarioError("unknown weight type '" + type + "'");
}

inline std::size_t scaled(std::size_t count, double s, bool periodic) {
  if (periodic) return std::max<std::size_t>(3, static_cast<std::size_t>(std::lround(static_cast<double>(count) * s)));
  return std::max<std::size_t>(3, static_cast<std::size_t>(std::lround(static_cast<double>(count - 1) * s)) + 1);
}

/// [{"lo":0,"hi":1,"count":33}, ...] -> box
inline DomainPtr box_field(const Json& axes, double s) {
  if (!axes.is_array() || axes.empty()) throw ScenarioError("'box' must be a nonempty list of axes");
  std::vector<Interval> b;
  std::vector<std::size_t> c;
  for (const auto& a : axes) {
    b.push_back({value_or(a, "lo", 0.0), value_or(a, "hi", 1.0)});
    c.push_back(scaled(require(a, "count").get<std::size_t>(), s, false));
  }
  return DomainSpec::box(b, c);
}

/// {"t": {"lo","hi","count"}, "fiber": [{"lo","hi","count"}, ...]} -> periodic cylinder
inline DomainPtr cylinder_field(const Json& j, double s) {
  const Json& t = require(j, "t");
  std::vector<Interval> fiber;
  std::vector<std::size_t> counts;
  for (const auto& f : require(j, "fiber")) {
    fiber.push_back({value_or(f, "lo", 0.0), value_or(f, "hi", 2.0 * std::numbers::pi)});
    counts.push_back(scaled(require(f, "count").get<std::size_t>(), s, true));
  }
  return DomainSpec::cylinder({value_or(t, "lo", 0.0), value_or(t, "hi", 1.0)},
                              scaled(require(t, "count").get<std::size_t>(), s, false), fiber, counts);
}

inline double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline TrigOptions trig_options(const Json& sc, const DomainSpec& d) {
  TrigOptions o;
  o.modes = value_or(sc, "modes", 2);
  o.max_frequency = value_or(sc, "max_frequency", 2.0);
  o.max_harmonic = value_or(sc, "max_harmonic", 1);
  for (const auto& ax : d.grid().axes()) o.periods.push_back(ax.periodic ? ax.length() : 0.0);
  return o;
}

inline HomotopyOptions homotopy_options(const Json& sc) {
  HomotopyOptions h;
  h.t_nodes = value_or(sc, "t_nodes", h.t_nodes);
  h.interpolation_points = value_or(sc, "interpolation_points", h.interpolation_points);
  return h;
}

/// Random forms come from one generator per scenario so reports are reproducible.
struct Context {
  const RunOptions& opt;
  std::mt19937_64 rng;
  std::ostream& log;
};

inline Json homotopy_check(const Json& sc, Context& cx) {
  const auto domain = box_field(require(sc, "box"), *cx.opt.grid_scale);
  const Grid& g = domain->grid();
  const std::string op = value_or<std::string>(sc, "operator", "cone");
  if (op != "cone" && op != "averaged") throw ScenarioError("operator must be 'cone' or 'averaged'");
  const int forms = value_or(sc, "forms_per_degree", 5);
  const double tol = value_or(sc, "tolerance", op == "cone" ? 1e-6 : 1e-5);
  const auto hopt = homotopy_options(sc);
  DerivativeOptions dopt;
  dopt.order = value_or(sc, "derivative_order", dopt.order);
  const auto topt = trig_options(sc, *domain);
  std::vector<double> y;
  if (sc.contains("center")) y = sc.at("center").get<std::vector<double>>();
  else
    for (const auto& ax : g.axes()) y.push_back(0.5 * (ax.lo + ax.hi));
  const WeightProfile alpha = weight_field(sc, "alpha"), beta = weight_field(sc, "beta");
  const double p = value_or(sc, "p", 2.0), q = value_or(sc, "q", 2.0);
  const std::vector<std::size_t> yg(static_cast<std::size_t>(g.dim()), value_or<std::size_t>(sc, "y_nodes", 3));
  std::vector<int> degrees;
  if (sc.contains("degrees")) degrees = sc.at("degrees").get<std::vector<int>>();
  else
    for (int k = 1; k <= g.dim(); ++k) degrees.push_back(k);

  Json out{{"operator", op}, {"tolerance", tol}, {"grid", domain_to_json(*domain)["axes"]}};
  Json per = Json::array();
  for (int k : degrees) {
    if (k < 1 || k > g.dim()) throw ScenarioError("degrees must lie in [1, dim]");
    Json entry{{"k", k}};
    std::vector<double> res, ratios;
    std::optional<AssembledConstant> C;
    if (op == "averaged") C = assembled_constant(g, alpha, beta, k - 1, p, q);
    for (int f = 0; f < forms; ++f) {
      const auto t0 = std::chrono::steady_clock::now();
      double r = 0.0;
      if (op == "cone") {
        const TrigForm T = TrigForm::random(g.dim(), k, cx.rng, topt);
        const GridForm w = T.sample(domain);
        GridForm lhs = exterior_derivative(cone_homotopy(w, y, hopt), dopt);
        if (k < g.dim()) lhs += cone_homotopy(T.d().sample(domain), y, hopt);
        r = (lhs - w).max_abs() / std::max(w.max_abs(), 1e-300);
      } else {
        // closed input: w = d eta
        const GridForm w = TrigForm::random(g.dim(), k - 1, cx.rng, topt).d().sample(domain);
        const GridForm a = averaged_homotopy(w, alpha, yg, hopt);
        r = (exterior_derivative(a, dopt) - w).max_abs() / std::max(w.max_abs(), 1e-300);
        ratios.push_back(lp_norm(a, q, Metric::euclidean, &beta) / lp_norm(w, p));
      }
      res.push_back(r);
      cx.log << "  k=" << k << " form " << f << " residual " << r << " (" << elapsed(t0) << " s)\n";
    }
    double worst = 0.0;
    for (double r : res) worst = std::max(worst, r);
    entry["residuals"] = res;
    entry["max_residual"] = worst;
    if (C) {
      entry["ratios"] = ratios;
      entry["constant"] = C->C.to_json();
      double rmax = 0.0;
      for (double r : ratios) rmax = std::max(rmax, r);
      entry["max_ratio"] = rmax;
      const bool within = !C->C.divergent && rmax <= C->C.value;
      entry["ratio_within_constant"] = within;
      if (cx.opt.strict && !C->C.divergent && !within)
        throw StageError("norm ratio vs constant (k=" + std::to_string(k) + ")", rmax, C->C.value);
    }
    if (worst > tol) throw StageError("homotopy identity (k=" + std::to_string(k) + ")", worst, tol);
    per.push_back(entry);
  }
  out["degrees"] = per;
  return out;
}

inline Json constant(const Json& sc, Context& cx) {
  const std::string mode = value_or<std::string>(sc, "mode", "cylinder");
  const int k = require(sc, "k").get<int>();
  const double p = require(sc, "p").get<double>(), q = require(sc, "q").get<double>();
  Json out{{"mode", mode}, {"k", k}, {"p", p}, {"q", q}};
  std::vector<std::string> failed;
  if (mode == "box") {
    const auto D = box_field(require(sc, "box"), *cx.opt.grid_scale);
    const WeightProfile beta = weight_field(sc, "beta"), alpha = weight_field(sc, "alpha");
    const auto C = C_integral(D->grid(), beta, k, p, q);
    const auto bound = box_constant_bound(D->grid(), k, p, q);
    const auto asm_ = assembled_constant(D->grid(), alpha, beta, k, p, q);
    out["C"] = C.to_json();
    out["bound"] = bound.to_json();
    out["assembled"] = asm_.C.to_json();
    out["within_bound"] = !C.divergent && !bound.divergent && C.value <= bound.value * (1.0 + 1e-12);
    failed = C.hypothesis_failures;
    for (const auto& f : asm_.C.hypothesis_failures)
      if (std::find(failed.begin(), failed.end(), f) == failed.end()) failed.push_back(f);
  } else if (mode == "cylinder") {
    ConstantRequest req;
    req.k = k, req.p = p, req.q = q;
    req.p_bar = value_or(sc, "p_bar", p);
    req.D = cylinder_field(require(sc, "cylinder"), *cx.opt.grid_scale);
    req.n = req.D->fiber_dim();
    req.alpha = weight_field(sc, "alpha");
    req.beta = weight_field(sc, "beta");
    req.gamma = weight_field(sc, "gamma");
    const auto rep = cylinder_constant(req);
    out["report"] = rep.to_json();
    failed = rep.hypothesis_failures;
  } else {
    throw ScenarioError("constant mode must be 'box' or 'cylinder'");
  }
  if (!failed.empty()) throw HypothesisFailure(failed);
  return out;
}

inline Json glue(const Json& sc, Context& cx) {
  const int k = require(sc, "degree").get<int>();
  const int forms = value_or(sc, "forms", 3);
  const Json& cyl = require(sc, "cylinder");
  std::vector<double> scales = value_or(sc, "refinements", std::vector<double>{1.0});
  GlueOptions go;
  go.p = value_or(sc, "p", 2.0);
  go.q = value_or(sc, "q", 2.0);
  go.beta = weight_field(sc, "beta");
  go.gamma = weight_field(sc, "gamma");
  go.homotopy = homotopy_options(sc);
  go.y_nodes = value_or<std::size_t>(sc, "y_nodes", go.y_nodes);
  go.stage_tolerance = value_or(sc, "tolerance", 1e-5);
  const int arcs = value_or(cyl, "arcs", 3);
  const std::size_t overlap = value_or<std::size_t>(cyl, "overlap", 8);
  const double growth_limit = value_or(sc, "max_ratio_growth", 0.10);

  // the same forms on every refinement
  const auto probe = cylinder_field(cyl, 1.0);
  const auto topt = trig_options(sc, *probe);
  std::vector<TrigForm> etas;
  for (int f = 0; f < forms; ++f) etas.push_back(TrigForm::random(probe->dim(), k - 1, cx.rng, topt));

  Json levels = Json::array();
  std::vector<std::vector<double>> ratios(static_cast<std::size_t>(forms));
  for (double s : scales) {
    const double scale = s * *cx.opt.grid_scale;
    const auto dom = cylinder_field(cyl, scale);
    const auto cover = GoodCover::product_arcs(dom, arcs, static_cast<std::size_t>(std::lround(static_cast<double>(overlap) * scale)));
    const auto rho = PartitionOfUnity::smooth_bumps(cover);
    Json lvl{{"scale", scale}, {"grid", domain_to_json(*dom)["axes"]}, {"patches", cover.patch_count()}};
    Json per = Json::array();
    for (int f = 0; f < forms; ++f) {
      const auto t0 = std::chrono::steady_clock::now();
      const GridForm w = etas[static_cast<std::size_t>(f)].d().sample(dom);
      const auto res = glue_primitive(w, cover, rho, go);
      Json stages = Json::array();
      for (const auto& st : res.stages) stages.push_back({{"stage", st.name}, {"residual", st.residual}, {"norm_ratio", st.norm_ratio}});
      Json consts = Json::object();
      for (const auto& [I, c] : res.correction.c) consts[std::to_string(I)] = c;
      per.push_back({{"residual", res.residual}, {"norm_ratio", res.norm_ratio}, {"p_bar", res.p_bar ? Json(*res.p_bar) : Json(nullptr)},
                     {"stages", stages}, {"constants", consts}});
      ratios[static_cast<std::size_t>(f)].push_back(res.norm_ratio);
      cx.log << "  scale " << scale << " form " << f << " residual " << res.residual << " ratio " << res.norm_ratio
             << " (" << elapsed(t0) << " s)\n";
    }
    lvl["forms"] = per;
    levels.push_back(lvl);
  }
  double growth = 0.0;
  for (const auto& r : ratios)
    for (std::size_t i = 1; i < r.size(); ++i) growth = std::max(growth, r[i] / r[0] - 1.0);
  Json out{{"degree", k}, {"levels", levels}, {"max_ratio_growth", growth}, {"ratio_growth_limit", growth_limit}};
  if (cx.opt.strict && growth > growth_limit) throw StageError("norm ratio growth across refinements", growth, growth_limit);
  return out;
}

inline DeRham de_rham_field(const Json& sc, int n, int k) {
  const std::string f = value_or<std::string>(sc, "de_rham", "unknown");
  if (f == "zero") return DeRham::zero;
  if (f == "nonzero") return DeRham::nonzero;
  if (f == "sphere") return sphere_de_rham(n, k);
  if (f == "unknown") return DeRham::unknown;
  throw ScenarioError("de_rham must be zero, nonzero, sphere or unknown");
}

inline std::optional<PowerLawWarp> warp_field(const Json& sc) {
  if (!sc.contains("warp")) return std::nullopt;
  const Json& w = sc.at("warp");
  PowerLawWarp pw;
  if (w.contains("lambda")) pw.lambda_s = pw.lambda_g = rational_field(w.at("lambda"));
  if (w.contains("lambda_s")) pw.lambda_s = rational_field(w.at("lambda_s"));
  if (w.contains("lambda_g")) pw.lambda_g = rational_field(w.at("lambda_g"));
  pw.a = value_or(w, "a", 0.0);
  if (w.contains("b") && w.at("b").is_null()) pw.b = std::nullopt;
  else if (w.contains("b") && w.at("b").is_string() && w.at("b").get<std::string>() == "inf") pw.b = std::nullopt;
  else pw.b = value_or(w, "b", 1.0);
  return pw;
}

inline Json vanish(const Json& sc, Context&) {
  CriterionInput in;
  const bool asymptotic = sc.contains("m");
  in.k = require(sc, "k").get<int>();
  in.n = asymptotic ? require(sc, "m").get<int>() - 1 : require(sc, "n").get<int>();
  in.p = rational_field(require(sc, "p"));
  in.q = rational_field(require(sc, "q"));
  in.power = warp_field(sc);
  if (!in.power) {
    if (!sc.contains("domain")) throw ScenarioError("vanish needs 'warp' or a tabulated 'domain'");
    in.sampled = domain_from_json(sc.at("domain"));
  }
  in.de_rham = de_rham_field(sc, in.n, in.k);
  const std::string mode = value_or<std::string>(sc, "mode", in.power ? "exact" : "numeric");
  if (mode != "exact" && mode != "numeric") throw ScenarioError("mode must be 'exact' or 'numeric'");
  const auto m = mode == "exact" ? CriterionMode::exact : CriterionMode::numeric;
  CriterionOptions co;
  co.p_bar_nodes = value_or(sc, "p_bar_nodes", co.p_bar_nodes);
  const auto rep = asymptotic ? asymptotic_delegate(in.n + 1, in, in.de_rham, m, co) : criterion_check(in, m, co);
  Json out{{"n", in.n}, {"k", in.k}, {"p", to_string(in.p)}, {"q", to_string(in.q)}, {"asymptotic", asymptotic},
           {"report", rep.to_json()}};
  if (in.power) {
    const auto ex = powerlaw_exponents(in.power->lambda_s, in.power->lambda_g, in.power->b.has_value());
    out["exponents"] = {{"alpha", ex.alpha.str()}, {"alpha1", ex.alpha1.str()}, {"beta", ex.beta.str()}};
    out["region_member"] = admissible_region(in.n, in.k, ex, in.power->b.has_value()).contains(in.p, in.q);
  }
  if (rep.verdict == Verdict::hypotheses_fail) throw Refused(rep.failed, out);
  return out;
}

inline Json region(const Json& sc, Context& cx) {
  const int n = require(sc, "n").get<int>();
  std::vector<int> ks;
  if (sc.contains("k") && sc.at("k").is_array()) ks = sc.at("k").get<std::vector<int>>();
  else ks.push_back(require(sc, "k").get<int>());
  const bool b_finite = !(sc.contains("b") && (sc.at("b").is_null() || (sc.at("b").is_string() && sc.at("b").get<std::string>() == "inf")));
  ExponentSummary ex;
  if (sc.contains("lambda")) {
    ex = powerlaw_exponents(rational_field(sc.at("lambda")), b_finite);
  } else {
    ex.alpha = ExtRational::of(rational_field(require(sc, "alpha")));
    ex.beta = ExtRational::of(rational_field(require(sc, "beta")));
    ex.alpha1 = ex.alpha;
  }
  std::optional<Rational> p;
  if (sc.contains("p")) p = rational_field(sc.at("p"));
  const int resolution = value_or(sc, "resolution", 40);
  std::vector<AdmissibleRegion> regs;
  Json per = Json::array();
  for (int k : ks) {
    regs.emplace_back(n, k, ex.alpha, ex.beta, b_finite);
    Json r = regs.back().to_json();
    if (p) r["q_interval"] = regs.back().q_interval(*p).str();
    per.push_back(r);
  }
  const auto path = std::filesystem::path(cx.opt.out) / "region.csv";
  std::ofstream csv(path);
  emit_region_csv(csv, regs, resolution, p);
  if (!csv) throw Error("cannot write " + path.string());
  return {{"n", n}, {"alpha", ex.alpha.str()}, {"beta", ex.beta.str()}, {"regions", per}, {"resolution", resolution},
          {"csv", "region.csv"}};
}

inline void write_report(const RunOptions& opt, const Json& report) {
  std::filesystem::create_directories(opt.out);
  const auto path = std::filesystem::path(opt.out) / "report.json";
  std::ofstream os(path);
  os << dump_json(report) << '\n';
  if (!os) throw Error("cannot write " + path.string());
}

}  // namespace detail

/// Runs one scenario file; writes <out>/report.json (and region.csv for `region`).
/// Returns 0 on success, 2 when a hypothesis fails, 1 on any other error.
inline int run(const RunOptions& opt, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  Json report{{"scenario", std::filesystem::path(opt.scenario).filename().string()}};
  try {
    const Json sc = read_json_file(opt.scenario);
    if (!sc.is_object()) throw ScenarioError("scenario must be a JSON object");
    const std::string cmd = detail::require(sc, "command").get<std::string>();
    report["command"] = cmd;
    std::uint64_t seed = opt.seed ? *opt.seed : detail::value_or<std::uint64_t>(sc, "seed", 1);
    RunOptions eff = opt;
    eff.strict = opt.strict || detail::value_or(sc, "strict", false);
    eff.grid_scale = opt.grid_scale ? *opt.grid_scale : detail::value_or(sc, "grid_scale", 1.0);
    if (!(*eff.grid_scale > 0.0)) throw ScenarioError("grid scale must be positive");
    report["seed"] = seed;
    report["grid_scale"] = *eff.grid_scale;
    report["strict"] = eff.strict;
    std::filesystem::create_directories(eff.out);
    detail::Context cx{eff, std::mt19937_64(seed), log};
    Json body;
    if (cmd == "homotopy-check") body = detail::homotopy_check(sc, cx);
    else if (cmd == "constant") body = detail::constant(sc, cx);
    else if (cmd == "glue") body = detail::glue(sc, cx);
    else if (cmd == "vanish") body = detail::vanish(sc, cx);
    else if (cmd == "region") body = detail::region(sc, cx);
    else throw ScenarioError("unknown command '" + cmd + "'");
    report["status"] = "ok";
    report["result"] = body;
    detail::write_report(eff, report);
    return exit_ok;
  } catch (const HypothesisFailure& e) {
    report["status"] = "refused";
    report["failed"] = e.failed();
    if (const auto* r = dynamic_cast<const detail::Refused*>(&e)) report["result"] = r->details();
    err << "refused: hypothesis failure:";
    for (const auto& f : e.failed()) err << "\n  - " << f;
    err << '\n';
    try {
      detail::write_report(opt, report);
    } catch (const std::exception&) {
    }
    return exit_refused;
  } catch (const StageError& e) {
    report["status"] = "error";
    report["error"] = e.what();
    report["stage"] = e.stage();
    err << "error: " << e.what() << '\n';
  } catch (const Json::exception& e) {
    report["status"] = "error";
    report["error"] = std::string("schema violation: ") + e.what();
    err << "error: schema violation: " << e.what() << '\n';
  } catch (const std::exception& e) {
    report["status"] = "error";
    report["error"] = e.what();
    err << "error: " << e.what() << '\n';
  }
  try {
    detail::write_report(opt, report);
  } catch (const std::exception&) {
  }
  return exit_error;
}

}  // namespace lqp::cli
