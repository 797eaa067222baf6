#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lqp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed grid, domain or form (shape mismatch, wrong degree, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numeric stage produced a residual above its tolerance.
class StageError : public Error {
 public:
  StageError(std::string stage, double residual, double tolerance)
      : Error("stage '" + stage + "' residual " + std::to_string(residual) +
              " exceeds tolerance " + std::to_string(tolerance)),
        stage_(std::move(stage)),
        residual_(residual),
        tolerance_(tolerance) {}

  const std::string& stage() const { return stage_; }
  double residual() const { return residual_; }
  double tolerance() const { return tolerance_; }

 private:
  std::string stage_;
  double residual_;
  double tolerance_;
};

/// Structured refusal: the named hypotheses do not hold.
class HypothesisFailure : public Error {
 public:
  explicit HypothesisFailure(std::vector<std::string> failed)
      : Error(join(failed)), failed_(std::move(failed)) {}

  const std::vector<std::string>& failed() const { return failed_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "hypotheses failed:";
    for (const auto& s : items) out += " [" + s + "]";
    return out;
  }
  std::vector<std::string> failed_;
};

}  // namespace lqp
