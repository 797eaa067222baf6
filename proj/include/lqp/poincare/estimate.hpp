#pragma once

#include <limits>
#include <string>
#include <vector>

#include "lqp/io/json_io.hpp"

namespace lqp {

/// A real value or a divergence flag, with the hypotheses that failed.
struct Estimate {
  double value = 0.0;
  bool divergent = false;
  std::vector<std::string> hypothesis_failures;

  static Estimate finite(double v) { return {v, false, {}}; }
  static Estimate diverges(std::string why) {
    return {std::numeric_limits<double>::infinity(), true, {std::move(why)}};
  }

  Json to_json() const {
    Json j{{"divergent", divergent}, {"hypothesis_failures", hypothesis_failures}};
    j["value"] = divergent ? Json(nullptr) : Json(value);
    return j;
  }
};

/// Values above this are reported as numerically divergent when no symbolic decision exists.
inline constexpr double divergence_threshold = 1e6;

}  // namespace lqp
