#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "lqp/cech/cover.hpp"
#include "lqp/forms/exterior_derivative.hpp"
#include "lqp/forms/norms.hpp"

namespace lqp {

/// Element of K^{k,s}: a k-form on every nonempty V_I with |I| = s (s = 0: one global form, key 0).
struct CechCochain {
  int degree = 0;
  int level = 0;
  std::map<PatchSet, GridForm> parts;

  double max_abs() const {
    double m = 0.0;
    for (const auto& [I, f] : parts) m = std::max(m, f.max_abs());
    return m;
  }
};

inline CechCochain zero_cochain(const GoodCover& cover, int degree, int level) {
  CechCochain c{degree, level, {}};
  for (PatchSet I : cover.nerve(level)) c.parts.emplace(I, GridForm(cover.chart(I), degree));
  return c;
}

/// The global form restricted to every patch: the level-1 cochain (delta w)_j = w|V_j.
inline CechCochain restrict_global(const GoodCover& cover, const GridForm& w) {
  CechCochain c{w.degree(), 1, {}};
  for (PatchSet J : cover.nerve(1)) c.parts.emplace(J, cover.restrict_to(w, 0, J));
  return c;
}

/// (delta k)_J = sum_r (-1)^r k_{J - j_r} restricted to V_J.
inline CechCochain coboundary(const GoodCover& cover, const CechCochain& k) {
  CechCochain out = zero_cochain(cover, k.degree, k.level + 1);
  for (auto& [J, dst] : out.parts) {
    const auto idx = patches_of(J);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const PatchSet I = J & ~(PatchSet{1} << idx[r]);
      auto it = k.parts.find(I);
      if (it == k.parts.end()) throw DomainError("cochain is missing a component");
      dst.axpy(r % 2 == 0 ? 1.0 : -1.0, cover.restrict_to(it->second, I, J));
    }
  }
  return out;
}

/// Componentwise exterior derivative on each chart.
inline CechCochain cochain_derivative(const CechCochain& k, const DerivativeOptions& opt = {}) {
  CechCochain out{k.degree + 1, k.level, {}};
  for (const auto& [I, f] : k.parts) out.parts.emplace(I, exterior_derivative(f, opt));
  return out;
}

inline CechCochain operator-(const CechCochain& a, const CechCochain& b) {
  CechCochain out = a;
  for (auto& [I, f] : out.parts) f -= b.parts.at(I);
  return out;
}

/// sum_I ||k_I||_{L^q(V_I, beta)}
inline double cochain_norm(const CechCochain& k, double q, const WeightProfile* beta = nullptr) {
  double s = 0.0;
  for (const auto& [I, f] : k.parts) s += lp_norm(f, q, Metric::euclidean, beta);
  return s;
}

/// Sign of moving patch j to the front of the sorted set J (j in J).
inline int prepend_sign(int j, PatchSet J) {
  const PatchSet below = J & ((PatchSet{1} << j) - 1u);
  return std::popcount(below) % 2 == 0 ? 1 : -1;
}

/// k_I = sum_j rho_j lambda_{j I}, each term extended by zero from V_{jI} to V_I.
/// For a cocycle lambda (delta lambda = 0) this satisfies delta k = lambda.
inline CechCochain solve_coboundary(const GoodCover& cover, const PartitionOfUnity& rho, const CechCochain& lambda) {
  if (lambda.level < 1) throw DomainError("solve_coboundary needs a cochain of level >= 1");
  CechCochain out = zero_cochain(cover, lambda.degree, lambda.level - 1);
  for (auto& [I, dst] : out.parts) {
    for (std::size_t j = 0; j < cover.patch_count(); ++j) {
      const PatchSet bit = PatchSet{1} << j;
      if (I & bit) continue;
      const PatchSet J = I | bit;
      auto it = lambda.parts.find(J);
      if (it == lambda.parts.end()) continue;
      GridForm term = it->second;
      const auto r = cover.restrict_field(rho.rho(j), J);
      for (std::size_t c = 0; c < term.component_count(); ++c)
        for (std::size_t i = 0; i < r.size(); ++i) term.field(c)[i] *= r[i];
      cover.add_extended(dst, I, term, J, prepend_sign(static_cast<int>(j), J));
    }
  }
  return out;
}

struct ConstantCorrection {
  /// c_I per level-k set I
  std::map<PatchSet, double> c;
  /// representative constant m_L of each level-(k+1) component
  std::map<PatchSet, double> m;
  /// max_L |(delta c)_L - m_L|
  double residual = 0.0;
  /// max over L of the spread of the component around m_L
  double spread = 0.0;
};

/// Constants c on level-k sets with delta c = m, m_L the mean of the level-(k+1) 0-cochain `target`.
/// Solved by minimum-norm least squares; inconsistency shows up as a nonzero residual.
inline ConstantCorrection constant_correction(const GoodCover& cover, const CechCochain& target) {
  if (target.degree != 0) throw DomainError("constant correction acts on 0-forms");
  const int level = target.level;
  const auto& rows = cover.nerve(level);
  const auto& cols = cover.nerve(level - 1);
  std::map<PatchSet, int> col_pos;
  for (std::size_t i = 0; i < cols.size(); ++i) col_pos[cols[i]] = static_cast<int>(i);
  ConstantCorrection out;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  Eigen::VectorXd m(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const PatchSet L = rows[r];
    const auto& f = target.parts.at(L).field(0);
    double mean = 0.0;
    for (double v : f) mean += v;
    mean /= static_cast<double>(f.size());
    for (double v : f) out.spread = std::max(out.spread, std::abs(v - mean));
    out.m[L] = mean;
    m(static_cast<Eigen::Index>(r)) = mean;
    const auto idx = patches_of(L);
    for (std::size_t s = 0; s < idx.size(); ++s) {
      const PatchSet I = L & ~(PatchSet{1} << idx[s]);
      A(static_cast<Eigen::Index>(r), col_pos.at(I)) += s % 2 == 0 ? 1.0 : -1.0;
    }
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols.size()));
  if (rows.size() > 0) c = A.completeOrthogonalDecomposition().solve(m);
  for (std::size_t i = 0; i < cols.size(); ++i) out.c[cols[i]] = c(static_cast<Eigen::Index>(i));
  if (rows.size() > 0) out.residual = (A * c - m).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace lqp
