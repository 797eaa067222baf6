#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "lqp/cech/glue.hpp"
#include "lqp/forms/trig_form.hpp"

using namespace lqp;

namespace {

const double two_pi = 2.0 * std::numbers::pi;

DomainPtr circle_cylinder(std::size_t nt = 17, std::size_t nx = 48) {
  return DomainSpec::cylinder({0.0, 1.0}, nt, {{0.0, two_pi}}, {nx});
}

CechCochain random_cochain(const GoodCover& cover, int degree, int level, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  CechCochain c = zero_cochain(cover, degree, level);
  for (auto& [I, f] : c.parts)
    for (std::size_t k = 0; k < f.component_count(); ++k)
      for (double& v : f.field(k)) v = U(rng);
  return c;
}

}  // namespace

TEST(GoodCover, CircleNerve) {
  const auto cover = GoodCover::product_arcs(circle_cylinder(), 3, 8);
  EXPECT_EQ(cover.patch_count(), 3u);
  EXPECT_EQ(cover.nerve(1).size(), 3u);
  EXPECT_EQ(cover.nerve(2).size(), 3u);
  EXPECT_TRUE(cover.nerve(3).empty());
}

TEST(GoodCover, TorusNerveIsProduct) {
  const auto M = DomainSpec::cylinder({0.0, 1.0}, 5, {{0.0, two_pi}, {0.0, two_pi}}, {48, 48});
  const auto cover = GoodCover::product_arcs(M, 3, 8);
  EXPECT_EQ(cover.patch_count(), 9u);
  // any two of three arcs on a circle meet, so every pair of patches meets;
  // a nonempty set uses at most two arcs per axis
  EXPECT_EQ(cover.nerve(2).size(), 36u);
  EXPECT_EQ(cover.max_level(), 4);
}

TEST(GoodCover, RejectsWideOverlap) {
  EXPECT_THROW(GoodCover::product_arcs(circle_cylinder(17, 24), 3, 6), DomainError);
}

TEST(PartitionOfUnity, SumsToOneAndVanishesNearEdges) {
  const auto cover = GoodCover::product_arcs(circle_cylinder(), 3, 8);
  const auto rho = PartitionOfUnity::smooth_bumps(cover);
  EXPECT_NO_THROW(rho.validate(cover, 1e-12));
  EXPECT_THROW(PartitionOfUnity::smooth_bumps(GoodCover::product_arcs(circle_cylinder(), 3, 4)), DomainError);
}

TEST(Cochain, CoboundarySquaredIsZero) {
  std::mt19937_64 rng(12);
  const auto M = DomainSpec::cylinder({0.0, 1.0}, 3, {{0.0, two_pi}, {0.0, two_pi}}, {48, 48});
  const auto cover = GoodCover::product_arcs(M, 3, 8);
  for (int level = 1; level <= 2; ++level) {
    const auto c = random_cochain(cover, 1, level, rng);
    EXPECT_LT(coboundary(cover, coboundary(cover, c)).max_abs(), 1e-14);
  }
}

TEST(Cochain, SolveCoboundaryInvertsOnCocycles) {
  std::mt19937_64 rng(13);
  const auto M = DomainSpec::cylinder({0.0, 1.0}, 3, {{0.0, two_pi}, {0.0, two_pi}}, {48, 48});
  const auto cover = GoodCover::product_arcs(M, 3, 8);
  const auto rho = PartitionOfUnity::smooth_bumps(cover);
  for (int level = 1; level <= 3; ++level) {
    const auto lambda = coboundary(cover, random_cochain(cover, 0, level, rng));
    const auto back = coboundary(cover, solve_coboundary(cover, rho, lambda)) - lambda;
    EXPECT_LT(back.max_abs(), 1e-13) << "level " << level;
  }
}

TEST(Glue, ExactFormsOnCircleCylinder) {
  std::mt19937_64 rng(14);
  const auto M = circle_cylinder();
  const auto cover = GoodCover::product_arcs(M, 3, 8);
  const auto rho = PartitionOfUnity::smooth_bumps(cover);
  TrigOptions o;
  o.periods = {0.0, two_pi};
  o.max_frequency = 1.5;
  GlueOptions go;
  go.stage_tolerance = 1e-5;
  for (int k = 1; k <= 2; ++k) {
    const GridForm w = TrigForm::random(2, k - 1, rng, o).d().sample(M);
    const auto r = glue_primitive(w, cover, rho, go);
    EXPECT_LT(r.residual, 1e-5) << "k=" << k;
    EXPECT_GT(r.norm_ratio, 0.0);
    ASSERT_TRUE(r.p_bar.has_value());
  }
}

TEST(Glue, AngularFormIsNotExact) {
  // d theta is closed on [0,1) x S^1 with nonzero period
  const auto M = circle_cylinder();
  const auto cover = GoodCover::product_arcs(M, 3, 8);
  const auto rho = PartitionOfUnity::smooth_bumps(cover);
  GridForm w(M, 1);
  w[mask_of({1})].assign(M->grid().size(), 1.0);
  try {
    glue_primitive(w, cover, rho);
    FAIL() << "expected a refusal";
  } catch (const HypothesisFailure& e) {
    ASSERT_EQ(e.failed().size(), 1u);
    EXPECT_NE(e.failed()[0].find("exact"), std::string::npos) << e.failed()[0];
  }
}

TEST(Glue, RefusesNonClosedForm) {
  const auto M = circle_cylinder();
  const auto cover = GoodCover::product_arcs(M, 3, 8);
  const auto rho = PartitionOfUnity::smooth_bumps(cover);
  // t d theta: d(t d theta) = dt ^ d theta
  const GridForm w = GridForm::from_function(M, 1, [](MultiIndex I, std::span<const double> p) { return I == 2u ? p[0] : 0.0; });
  EXPECT_THROW(glue_primitive(w, cover, rho), HypothesisFailure);
}

TEST(Glue, RefusesDivergentBeta) {
  const auto M = circle_cylinder();
  const auto cover = GoodCover::product_arcs(M, 3, 8);
  const auto rho = PartitionOfUnity::smooth_bumps(cover);
  GlueOptions go;
  go.beta = WeightProfile::power_law(1.0, 2.0);
  const GridForm w = GridForm::from_function(M, 1, [](MultiIndex I, std::span<const double>) { return I == 1u ? 1.0 : 0.0; });
  try {
    glue_primitive(w, cover, rho, go);
    FAIL() << "expected a refusal";
  } catch (const HypothesisFailure& e) {
    EXPECT_NE(std::string(e.what()).find("beta"), std::string::npos) << e.what();
  }
}
