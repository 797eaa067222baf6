#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "lqp/forms/grid_form.hpp"

namespace lqp {

/// amp * sin(kappa . x + phase)
struct TrigMode {
  double amp = 0.0;
  std::vector<double> kappa;
  double phase = 0.0;

  double value(std::span<const double> x) const {
    double s = phase;
    for (std::size_t a = 0; a < kappa.size(); ++a) s += kappa[a] * x[a];
    return amp * std::sin(s);
  }
};

struct TrigOptions {
  int modes = 2;
  /// bound on |kappa_a| along non-periodic axes
  double max_frequency = 2.0;
  /// period per axis; 0 marks a non-periodic axis
  std::vector<double> periods;
  /// bound on the integer harmonic along periodic axes
  int max_harmonic = 1;
};

/// Form with trigonometric coefficients and an exact exterior derivative.
class TrigForm {
 public:
  TrigForm(int dim, int degree) : dim_(dim), degree_(degree) {}

  static TrigForm random(int dim, int degree, std::mt19937_64& rng, const TrigOptions& opt = {}) {
    TrigForm out(dim, degree);
    std::uniform_real_distribution<double> u(-1.0, 1.0), ph(0.0, 2.0 * std::numbers::pi);
    std::uniform_int_distribution<int> harm(-opt.max_harmonic, opt.max_harmonic);
    for (MultiIndex I : increasing_indices(dim, degree)) {
      for (int m = 0; m < opt.modes; ++m) {
        TrigMode mode;
        mode.amp = u(rng);
        mode.kappa.resize(static_cast<std::size_t>(dim));
        for (int a = 0; a < dim; ++a) {
          const double period = a < static_cast<int>(opt.periods.size()) ? opt.periods[static_cast<std::size_t>(a)] : 0.0;
          mode.kappa[static_cast<std::size_t>(a)] =
              period > 0.0 ? 2.0 * std::numbers::pi * harm(rng) / period : opt.max_frequency * u(rng);
        }
        mode.phase = ph(rng);
        out.terms_[I].push_back(std::move(mode));
      }
    }
    return out;
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }

  void add(MultiIndex I, TrigMode m) { terms_[I].push_back(std::move(m)); }

  double coefficient(MultiIndex I, std::span<const double> x) const {
    auto it = terms_.find(I);
    if (it == terms_.end()) return 0.0;
    double s = 0.0;
    for (const auto& m : it->second) s += m.value(x);
    return s;
  }

  /// Exact d: d_a sin(k.x + f) = k_a sin(k.x + f + pi/2).
  TrigForm d() const {
    if (degree_ >= dim_) throw DomainError("exterior derivative of a top-degree form");
    TrigForm out(dim_, degree_ + 1);
    for (const auto& [I, modes] : terms_) {
      for (int a = 0; a < dim_; ++a) {
        if (has_axis(I, a)) continue;
        const MultiIndex J = I | (MultiIndex{1} << a);
        const double s = wedge_sign(a, I);
        for (const auto& m : modes) {
          const double ka = m.kappa[static_cast<std::size_t>(a)];
          if (ka == 0.0) continue;
          out.terms_[J].push_back({s * m.amp * ka, m.kappa, m.phase + 0.5 * std::numbers::pi});
        }
      }
    }
    return out;
  }

  GridForm sample(DomainPtr domain) const {
    if (domain->dim() != dim_) throw DomainError("dimension mismatch");
    return GridForm::from_function(std::move(domain), degree_,
                                   [this](MultiIndex I, std::span<const double> x) { return coefficient(I, x); });
  }

 private:
  int dim_;
  int degree_;
  std::map<MultiIndex, std::vector<TrigMode>> terms_;
};

}  // namespace lqp
