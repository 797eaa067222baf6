#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include <boost/rational.hpp>

#include "lqp/core/error.hpp"

namespace lqp {

using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

/// "3", "-7/2" or "2.5" (finite decimals only).
inline Rational parse_rational(const std::string& s) {
  try {
    if (const auto slash = s.find('/'); slash != std::string::npos)
      return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    if (const auto dot = s.find('.'); dot != std::string::npos) {
      const std::string frac = s.substr(dot + 1);
      if (frac.size() > 15) throw DomainError("too many decimals in '" + s + "'");
      std::int64_t den = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
      const bool neg = !s.empty() && s[0] == '-';
      const std::int64_t whole = dot == 0 || (dot == 1 && neg) ? 0 : std::stoll(s.substr(0, dot));
      const std::int64_t part = frac.empty() ? 0 : std::stoll(frac);
      return Rational(whole) + Rational(neg ? -part : part, den);
    }
    return Rational(std::stoll(s));
  } catch (const std::invalid_argument&) {
    throw DomainError("not a rational number: '" + s + "'");
  } catch (const boost::bad_rational&) {
    throw DomainError("zero denominator in '" + s + "'");
  }
}

/// Exact rational equal to x, found by continued fractions with denominator <= max_den.
inline Rational rational_from_double(double x, std::int64_t max_den = 1000000) {
  if (!std::isfinite(x)) throw DomainError("non-finite value has no rational form");
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1, h1 = h2, k0 = k1, k1 = k2;
    if (static_cast<double>(h1) / static_cast<double>(k1) == x) return Rational(h1, k1);
    if (r - a == 0.0) break;
    r = 1.0 / (r - a);
  }
  throw DomainError("value " + std::to_string(x) + " is not a short rational; pass it as \"num/den\"");
}

/// A rational or +infinity.
struct ExtRational {
  bool infinite = false;
  Rational value{0};

  static ExtRational inf() { return {true, Rational(0)}; }
  static ExtRational of(Rational r) { return {false, r}; }
  std::string str() const { return infinite ? "inf" : lqp::to_string(value); }
  double to_double() const { return infinite ? INFINITY : lqp::to_double(value); }
};

/// Maximal integrability exponents for a power-law warp:
/// s^u integrable for u < alpha, t s^u for u < alpha1, g^v for v < beta.
struct ExponentSummary {
  ExtRational alpha;
  ExtRational alpha1;
  ExtRational beta;
};

/// Exponents of s = (b-t)^(-lambda) on [a, b) with b finite. lambda <= 0 leaves the
/// profile bounded, every power is integrable and the exponent is +inf.
/// With b = inf the profile is modelled as t^lambda on [a, inf), a > 0.
inline ExtRational powerlaw_alpha(const Rational& lambda, bool b_finite, bool times_t = false) {
  if (b_finite) return lambda <= Rational(0) ? ExtRational::inf() : ExtRational::of(Rational(1) / lambda);
  if (lambda <= Rational(0)) throw DomainError("power law on [a, inf) needs lambda > 0");
  // t^(lambda u) integrable at inf iff lambda u < -1; with the factor t iff lambda u < -2
  return ExtRational::of(Rational(times_t ? -2 : -1) / lambda);
}

inline ExponentSummary powerlaw_exponents(const Rational& lambda_s, const Rational& lambda_g, bool b_finite = true) {
  return {powerlaw_alpha(lambda_s, b_finite), powerlaw_alpha(lambda_s, b_finite, true), powerlaw_alpha(lambda_g, b_finite)};
}

inline ExponentSummary powerlaw_exponents(const Rational& lambda, bool b_finite = true) {
  return powerlaw_exponents(lambda, lambda, b_finite);
}

}  // namespace lqp
