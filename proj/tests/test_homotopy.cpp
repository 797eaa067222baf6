#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lqp/forms/exterior_derivative.hpp"
#include "lqp/forms/trig_form.hpp"
#include "lqp/homotopy/averaged.hpp"
#include "lqp/homotopy/cone.hpp"

using namespace lqp;

namespace {

DomainPtr box(int dim, std::size_t n) {
  return DomainSpec::box(std::vector<Interval>(static_cast<std::size_t>(dim), Interval{0.0, 1.0}),
                         std::vector<std::size_t>(static_cast<std::size_t>(dim), n));
}

}  // namespace

TEST(ConeHomotopy, ConstantOneForm) {
  // K_y (c dx_0) = int_0^1 c (x_0 - y_0) dt = c (x_0 - y_0)
  const auto D = box(2, 9);
  const GridForm w = GridForm::from_function(D, 1, [](MultiIndex I, std::span<const double>) { return I == 1u ? 3.0 : 0.0; });
  const std::vector<double> y{0.25, 0.6};
  const GridForm K = cone_homotopy(w, y);
  const Grid& g = D->grid();
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(K.field(0)[i], 3.0 * (g.coordinate(i, 0) - 0.25), 1e-14);
}

TEST(ConeHomotopy, ConstantAreaForm) {
  // K_y (dx ^ dy) = int t dt * ((x-y_0) dy - (y-y_1) dx) = ((x-y_0) dy - (y-y_1) dx) / 2
  const auto D = box(2, 9);
  const GridForm w = GridForm::from_function(D, 2, [](MultiIndex, std::span<const double>) { return 1.0; });
  const std::vector<double> y{0.5, 0.1};
  const GridForm K = cone_homotopy(w, y);
  const Grid& g = D->grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(K[mask_of({0})][i], -0.5 * (g.coordinate(i, 1) - 0.1), 1e-14);
    EXPECT_NEAR(K[mask_of({1})][i], 0.5 * (g.coordinate(i, 0) - 0.5), 1e-14);
  }
}

TEST(ConeHomotopy, IdentityOnRandomForms) {
  std::mt19937_64 rng(8);
  const auto D = box(3, 33);
  for (int k = 1; k <= 3; ++k) {
    const TrigForm T = TrigForm::random(3, k, rng);
    const std::vector<double> y{0.3, 0.7, 0.45};
    const GridForm w = T.sample(D);
    GridForm lhs = exterior_derivative(cone_homotopy(w, y));
    if (k < 3) lhs += cone_homotopy(T.d().sample(D), y);
    EXPECT_LT((lhs - w).max_abs() / w.max_abs(), 1e-6) << "k=" << k;
  }
}

TEST(ConeHomotopy, ResidualDecreasesUnderRefinement) {
  std::mt19937_64 rng(9);
  const TrigForm T = TrigForm::random(2, 1, rng);
  const std::vector<double> y{0.2, 0.9};
  double prev = INFINITY;
  for (std::size_t n : {9, 17, 33}) {
    const auto D = box(2, n);
    const GridForm w = T.sample(D);
    const double r = (exterior_derivative(cone_homotopy(w, y)) + cone_homotopy(T.d().sample(D), y) - w).max_abs();
    EXPECT_LT(r, prev / 3.7);  // order >= 1.9
    prev = r;
  }
}

TEST(ConeHomotopy, RejectsBadInput) {
  const auto D = box(2, 5);
  const std::vector<double> y{0.5, 0.5}, outside{1.5, 0.5};
  EXPECT_THROW(cone_homotopy(GridForm(D, 0), y), DomainError);
  EXPECT_THROW(cone_homotopy(GridForm(D, 1), outside), DomainError);
  const auto C = DomainSpec::cylinder({0.0, 1.0}, 5, {{0.0, 1.0}}, {6});
  EXPECT_THROW(cone_homotopy(GridForm(C, 1), y), DomainError);
}

TEST(ConePullback, DtComponentAtPoint) {
  // w = dx_0 ^ dx_1 constant: i_{x-y} w = (x_0 - y_0) dx_1 - (x_1 - y_1) dx_0, times t
  const auto D = box(2, 9);
  const GridForm w = GridForm::from_function(D, 2, [](MultiIndex, std::span<const double>) { return 2.0; });
  const std::vector<double> y{0.1, 0.2}, x{0.6, 0.9};
  const auto v = cone_pullback_fiber(w, y, x, 0.5);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_NEAR(v[0], -0.5 * 2.0 * 0.7, 1e-14);
  EXPECT_NEAR(v[1], 0.5 * 2.0 * 0.5, 1e-14);
}

TEST(AveragedHomotopy, CenterMeasureHasUnitMass) {
  const auto D = box(2, 9);
  const auto m = center_measure(WeightProfile::power_law(1.5, 0.5), D->grid(), {4, 3});
  double s = 0.0;
  for (double v : m.masses) s += v;
  EXPECT_NEAR(s, 1.0, 1e-14);
  EXPECT_EQ(m.points.size(), 12u);
}

TEST(AveragedHomotopy, PrimitiveOfClosedForms) {
  std::mt19937_64 rng(10);
  const auto D = box(2, 33);
  for (int k = 1; k <= 2; ++k) {
    const GridForm w = TrigForm::random(2, k - 1, rng).d().sample(D);
    const GridForm a = averaged_homotopy(w, WeightProfile::constant(1.0), {3, 3});
    EXPECT_LT((exterior_derivative(a) - w).max_abs() / w.max_abs(), 1e-5);
  }
}

TEST(AveragedHomotopy, AgreesWithConeForPointMass) {
  std::mt19937_64 rng(11);
  const auto D = box(2, 17);
  const GridForm w = TrigForm::random(2, 1, rng).sample(D);
  CenterMeasure m{{{0.3, 0.4}}, {1.0}};
  EXPECT_EQ((averaged_homotopy(w, m) - cone_homotopy(w, std::vector<double>{0.3, 0.4})).max_abs(), 0.0);
  CenterMeasure bad{{{0.3, 0.4}}, {0.5}};
  EXPECT_THROW(averaged_homotopy(w, bad), DomainError);
}

TEST(AveragedHomotopy, AdmissibilityOfPowerLawWeight) {
  const auto D = box(1, 65);
  // (1 - y)^{-1/2} is in L^{p'} iff p'/2 < 1
  const auto ok = check_admissible_weight(WeightProfile::power_law(1.0, 0.5), D->grid(), 4.0);  // p' = 4/3
  EXPECT_TRUE(std::isfinite(ok.norm));
  const auto bad = check_admissible_weight(WeightProfile::power_law(1.0, 0.5), D->grid(), 1.5);  // p' = 3
  EXPECT_FALSE(std::isfinite(bad.norm));
}
