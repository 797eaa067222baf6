#include <CLI11.hpp>

#include "lqp/cli/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"lqp: weighted L^{q,p} Poincare and vanishing computations"};
  lqp::cli::RunOptions opt;
  std::uint64_t seed = 0;
  double scale = 1.0;
  app.add_option("--scenario", opt.scenario, "scenario JSON file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", opt.out, "output directory for report.json / region.csv");
  auto* scale_opt = app.add_option("--grid-scale", scale, "multiplier on every grid resolution")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "seed for random test forms (overrides the scenario)");
  app.add_flag("--strict", opt.strict, "fail when measured norm ratios exceed their bounds");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : lqp::cli::exit_error;
  }
  if (*seed_opt) opt.seed = seed;
  if (*scale_opt) opt.grid_scale = scale;
  return lqp::cli::run(opt);
}
