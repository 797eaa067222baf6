#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lqp/forms/cylinder.hpp"
#include "lqp/forms/exterior_derivative.hpp"
#include "lqp/forms/norms.hpp"
#include "lqp/forms/trig_form.hpp"
#include "lqp/io/json_io.hpp"

using namespace lqp;

namespace {

DomainPtr box(int dim, std::size_t n) {
  return DomainSpec::box(std::vector<Interval>(static_cast<std::size_t>(dim), Interval{0.0, 1.0}),
                         std::vector<std::size_t>(static_cast<std::size_t>(dim), n));
}

}  // namespace

TEST(GridForm, RejectsDegreeOutOfRange) {
  EXPECT_THROW(GridForm(box(2, 5), 3), DomainError);
  EXPECT_THROW(GridForm(box(2, 5), -1), DomainError);
}

TEST(ExteriorDerivative, DiscreteDSquaredVanishes) {
  std::mt19937_64 rng(3);
  for (int dim : {2, 3}) {
    const auto D = box(dim, 17);
    for (int k = 0; k + 2 <= dim; ++k) {
      const GridForm w = TrigForm::random(dim, k, rng).sample(D);
      EXPECT_LT(exterior_derivative(exterior_derivative(w)).max_abs(), 1e-9 * std::max(1.0, w.max_abs()));
    }
  }
}

TEST(ExteriorDerivative, MatchesExactDerivativeOfTrigForm) {
  std::mt19937_64 rng(4);
  const auto D = box(3, 33);
  for (int k = 0; k < 3; ++k) {
    const TrigForm T = TrigForm::random(3, k, rng);
    const GridForm err = exterior_derivative(T.sample(D)) - T.d().sample(D);
    EXPECT_LT(err.max_abs(), 1e-6);
  }
}

TEST(ExteriorDerivative, OneFormOfPolynomial) {
  // d(x y^2) = y^2 dx + 2 x y dy
  const auto D = box(2, 9);
  const GridForm f = GridForm::from_function(D, 0, [](MultiIndex, std::span<const double> p) { return p[0] * p[1] * p[1]; });
  const GridForm df = exterior_derivative(f);
  const GridForm ex = GridForm::from_function(D, 1, [](MultiIndex I, std::span<const double> p) {
    return I == mask_of({0}) ? p[1] * p[1] : 2.0 * p[0] * p[1];
  });
  EXPECT_LT((df - ex).max_abs(), 1e-12);
}

TEST(Norms, ConstantFormNormIsVolumePower) {
  const auto D = DomainSpec::box({{0.0, 2.0}, {0.0, 3.0}}, {9, 13});
  const GridForm one = GridForm::from_function(D, 0, [](MultiIndex, std::span<const double>) { return 1.0; });
  EXPECT_NEAR(lp_norm(one, 1.0), 6.0, 1e-12);
  EXPECT_NEAR(lp_norm(one, 2.0), std::sqrt(6.0), 1e-12);
  EXPECT_NEAR(lp_norm(one, INFINITY), 1.0, 0.0);
}

TEST(Norms, PointwiseNormIsEuclideanInComponents) {
  const auto D = box(2, 5);
  const GridForm w = GridForm::from_function(D, 1, [](MultiIndex I, std::span<const double>) { return I == 1u ? 3.0 : 4.0; });
  for (double v : pointwise_norm(w)) EXPECT_NEAR(v, 5.0, 1e-14);
}

TEST(Cylinder, SplitRoundTrip) {
  std::mt19937_64 rng(5);
  const auto C = DomainSpec::cylinder({0.0, 1.0}, 9, {{0.0, 2.0 * std::numbers::pi}}, {12});
  TrigOptions o;
  o.periods = {0.0, 2.0 * std::numbers::pi};
  for (int k = 0; k <= 2; ++k) {
    const GridForm w = TrigForm::random(2, k, rng, o).sample(C);
    const auto s = decompose_cylinder(w);
    EXPECT_EQ((recompose_cylinder(s) - w).max_abs(), 0.0);
  }
}

TEST(Cylinder, FFProfilesOfConstantWarp) {
  // h = 2 on the whole cylinder: f = F = 2^{n/p - k}
  const auto C = DomainSpec::twisted_from({0.0, 1.0}, 5, {{0.0, 1.0}, {0.0, 1.0}}, {4, 4},
                                          [](double, std::span<const double>) { return 2.0; });
  const auto pr = fF_profiles(*C, 1, 4.0);
  for (std::size_t i = 0; i < pr.t.size(); ++i) {
    EXPECT_NEAR(pr.f[i], std::pow(2.0, 2.0 / 4.0 - 1.0), 1e-14);
    EXPECT_NEAR(pr.F[i], pr.f[i], 1e-14);
  }
}

TEST(JsonIo, FormRoundTripIsExact) {
  std::mt19937_64 rng(6);
  const auto D = box(2, 7);
  const GridForm w = TrigForm::random(2, 1, rng).sample(D);
  const GridForm back = deserialize_form(serialize_form(w));
  EXPECT_EQ(back.degree(), 1);
  EXPECT_EQ((back - w.rebind(back.domain_ptr())).max_abs(), 0.0);
}

TEST(JsonIo, SeventeenSignificantDigits) {
  const std::string s = dump_json(Json{{"x", 0.1}});
  EXPECT_NE(s.find("0.10000000000000001"), std::string::npos) << s;
}
