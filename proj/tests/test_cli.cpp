#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lqp/cli/run.hpp"

using namespace lqp;
namespace fs = std::filesystem;

namespace {

struct Ran {
  int code;
  Json report;
  std::string report_text;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("lqp_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Ran run_text(const std::string& name, const std::string& scenario, std::optional<double> scale = std::nullopt) {
  const auto d = scratch(name);
  {
    std::ofstream os(d / "scenario.json");
    os << scenario;
  }
  cli::RunOptions opt;
  opt.scenario = (d / "scenario.json").string();
  opt.out = (d / "out").string();
  opt.grid_scale = scale;
  std::ostringstream log, err;
  Ran r;
  r.code = cli::run(opt, log, err);
  r.err = err.str();
  r.report_text = slurp(d / "out" / "report.json");
  r.report = Json::parse(r.report_text);
  return r;
}

}  // namespace

TEST(Cli, MalformedScenarioIsError) {
  const auto r = run_text("malformed", "{\"command\": \"region\", ");
  EXPECT_EQ(r.code, cli::exit_error);
  EXPECT_NE(r.err.find("malformed JSON"), std::string::npos) << r.err;
  EXPECT_EQ(r.report["status"], "error");
}

TEST(Cli, SchemaErrorsNameTheField) {
  auto r = run_text("nocmd", "{}");
  EXPECT_EQ(r.code, cli::exit_error);
  EXPECT_NE(r.err.find("'command'"), std::string::npos);
  r = run_text("badcmd", R"({"command": "integrate"})");
  EXPECT_EQ(r.code, cli::exit_error);
  EXPECT_NE(r.err.find("unknown command"), std::string::npos);
  r = run_text("badtype", R"({"command": "region", "n": "four", "k": 3, "lambda": 2})");
  EXPECT_EQ(r.code, cli::exit_error);
}

TEST(Cli, MissingScenarioFile) {
  cli::RunOptions opt;
  opt.scenario = "/nonexistent/scenario.json";
  opt.out = scratch("missing").string();
  std::ostringstream log, err;
  EXPECT_EQ(cli::run(opt, log, err), cli::exit_error);
}

TEST(Cli, RegionCsvForSphere) {
  const auto r = run_text("region", R"({"command": "region", "n": 4, "k": 3, "p": 2, "lambda": 2, "resolution": 24})");
  ASSERT_EQ(r.code, cli::exit_ok) << r.err;
  EXPECT_EQ(r.report["result"]["regions"][0]["q_interval"], "[2, 8/3)");
  const std::string csv = slurp(fs::temp_directory_path() / "lqp_cli_test_region" / "out" / "region.csv");
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "inv_p,inv_q,k,verdict");
  double lo = 1.0, hi = 0.0;
  while (std::getline(is, line)) {
    double x, y;
    int k;
    char v[32];
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%d,%31s", &x, &y, &k, v), 4);
    if (std::string(v) == "member") lo = std::min(lo, y), hi = std::max(hi, y);
  }
  // 1/q in (3/8, 1/2] at resolution 24: 10/24 .. 12/24
  EXPECT_DOUBLE_EQ(lo, 10.0 / 24.0);
  EXPECT_DOUBLE_EQ(hi, 0.5);
}

TEST(Cli, EmptyRegionCsvIsHeaderOnly) {
  const auto r = run_text("region_empty", R"({"command": "region", "n": 4, "k": 3, "lambda": 2, "b": "inf"})");
  ASSERT_EQ(r.code, cli::exit_ok) << r.err;
  EXPECT_EQ(slurp(fs::temp_directory_path() / "lqp_cli_test_region_empty" / "out" / "region.csv"), "inv_p,inv_q,k,verdict\n");
}

TEST(Cli, VanishExitCodes) {
  auto r = run_text("vanish_ok", R"({"command": "vanish", "n": 2, "k": 1, "p": 2, "q": 2,
    "warp": {"lambda": "1/5", "a": 0, "b": 1}, "de_rham": "sphere"})");
  ASSERT_EQ(r.code, cli::exit_ok) << r.err;
  EXPECT_EQ(r.report["result"]["report"]["verdict"], "VANISHES");
  // power-law sphere data: in the closed-form region, but the L^q conditions of the criterion fail
  r = run_text("vanish_sphere", R"({"command": "vanish", "n": 4, "k": 3, "p": 2, "q": "5/2",
    "warp": {"lambda": 2}, "de_rham": "sphere"})");
  EXPECT_EQ(r.code, cli::exit_refused);
  EXPECT_EQ(r.report["status"], "refused");
  EXPECT_TRUE(r.report["result"]["region_member"].get<bool>());
  EXPECT_EQ(r.report["failed"][0], "||max(F_{k-2,q}, F_{k-1,q})||_{L^q} < inf");
}

TEST(Cli, ConstantRefusalNamesCondition) {
  const auto r = run_text("refuse", R"({"command": "constant", "mode": "cylinder", "k": 1, "p": 2, "q": 2,
    "cylinder": {"t": {"count": 17}, "fiber": [{"count": 16}]},
    "beta": {"type": "power_law", "b": 1, "lambda": 2}})");
  EXPECT_EQ(r.code, cli::exit_refused);
  EXPECT_NE(r.report["failed"][0].get<std::string>().find("beta"), std::string::npos);
  EXPECT_NE(r.err.find("refused"), std::string::npos);
}

TEST(Cli, ReportsAreByteIdentical) {
  const std::string sc = R"({"command": "homotopy-check", "box": [{"count": 17}, {"count": 17}], "forms_per_degree": 2, "seed": 5})";
  const auto a = run_text("det_a", sc), b = run_text("det_b", sc);
  ASSERT_EQ(a.code, cli::exit_ok) << a.err;
  EXPECT_EQ(a.report_text, b.report_text);
}

TEST(Cli, GridScaleRefinesBox) {
  const std::string sc = R"({"command": "homotopy-check", "box": [{"count": 9}, {"count": 9}], "forms_per_degree": 1})";
  const auto r = run_text("scale", sc, 2.0);
  ASSERT_EQ(r.code, cli::exit_ok) << r.err;
  EXPECT_EQ(r.report["result"]["grid"][0]["count"], 17);
}

TEST(Cli, AveragedHomotopyAgainstConstant) {
  const auto r = run_text("averaged", R"({"command": "homotopy-check", "operator": "averaged",
    "box": [{"count": 33}, {"count": 33}], "forms_per_degree": 2, "p": 2, "q": 2})");
  ASSERT_EQ(r.code, cli::exit_ok) << r.err;
  for (const auto& d : r.report["result"]["degrees"]) EXPECT_TRUE(d["ratio_within_constant"].get<bool>());
}

TEST(Cli, GlueSmallCircle) {
  const auto r = run_text("glue", R"({"command": "glue", "degree": 1, "forms": 2,
    "cylinder": {"t": {"count": 9}, "fiber": [{"count": 48}], "overlap": 8}, "refinements": [1, 1.5]})");
  ASSERT_EQ(r.code, cli::exit_ok) << r.err;
  EXPECT_LE(r.report["result"]["max_ratio_growth"].get<double>(), 0.1);
}
