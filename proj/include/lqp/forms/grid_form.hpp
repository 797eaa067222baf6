#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "lqp/core/multi_index.hpp"
#include "lqp/forms/domain.hpp"

namespace lqp {

/// Differential k-form sampled on a domain grid: one coefficient field per
/// increasing multi-index, stored in lexicographic order.
class GridForm {
 public:
  GridForm(DomainPtr domain, int degree) : domain_(std::move(domain)), degree_(degree) {
    if (!domain_) throw DomainError("form needs a domain");
    if (degree_ < 0 || degree_ > domain_->dim()) throw DomainError("degree out of range");
    indices_ = increasing_indices(domain_->dim(), degree_);
    positions_ = index_positions(domain_->dim(), degree_);
    coeffs_.assign(indices_.size(), std::vector<double>(domain_->grid().size(), 0.0));
  }

  /// Samples f(I, point) for each multi-index I and node.
  static GridForm from_function(DomainPtr domain, int degree,
                                const std::function<double(MultiIndex, std::span<const double>)>& f) {
    GridForm out(std::move(domain), degree);
    const Grid& g = out.grid();
    std::vector<double> p(static_cast<std::size_t>(g.dim()));
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.point(i, p);
      for (std::size_t c = 0; c < out.indices_.size(); ++c) out.coeffs_[c][i] = f(out.indices_[c], p);
    }
    return out;
  }

  int degree() const { return degree_; }
  int dim() const { return domain_->dim(); }
  const DomainSpec& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  const Grid& grid() const { return domain_->grid(); }
  std::size_t size() const { return grid().size(); }

  const std::vector<MultiIndex>& indices() const { return indices_; }
  std::size_t component_count() const { return indices_.size(); }
  int position(MultiIndex I) const { return positions_[I]; }

  std::vector<double>& field(std::size_t c) { return coeffs_[c]; }
  const std::vector<double>& field(std::size_t c) const { return coeffs_[c]; }
  std::vector<double>& operator[](MultiIndex I) { return coeffs_[checked(I)]; }
  const std::vector<double>& operator[](MultiIndex I) const { return coeffs_[checked(I)]; }

  /// Euclidean norm of the coefficient vector at one node.
  double norm_at(std::size_t i) const {
    double s = 0.0;
    for (const auto& f : coeffs_) s += f[i] * f[i];
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) m = std::max(m, norm_at(i));
    return m;
  }

  GridForm& operator+=(const GridForm& o) { return axpy(1.0, o); }
  GridForm& operator-=(const GridForm& o) { return axpy(-1.0, o); }
  GridForm& operator*=(double s) {
    for (auto& f : coeffs_)
      for (auto& v : f) v *= s;
    return *this;
  }
  GridForm& axpy(double s, const GridForm& o) {
    require_compatible(o);
    for (std::size_t c = 0; c < coeffs_.size(); ++c)
      for (std::size_t i = 0; i < size(); ++i) coeffs_[c][i] += s * o.coeffs_[c][i];
    return *this;
  }

  friend GridForm operator+(GridForm a, const GridForm& b) { return a += b; }
  friend GridForm operator-(GridForm a, const GridForm& b) { return a -= b; }
  friend GridForm operator*(double s, GridForm a) { return a *= s; }

  /// Same coefficients viewed on another domain with an identical grid.
  GridForm rebind(DomainPtr other) const {
    if (!other->same_grid(*domain_)) throw DomainError("rebind requires an identical grid");
    GridForm out(std::move(other), degree_);
    out.coeffs_ = coeffs_;
    return out;
  }

  void require_compatible(const GridForm& o) const {
    if (o.degree_ != degree_) throw DomainError("degree mismatch");
    if (o.domain_ != domain_ && !o.domain_->same_grid(*domain_)) throw DomainError("grid mismatch");
  }

 private:
  std::size_t checked(MultiIndex I) const {
    if (I >= positions_.size() || positions_[I] < 0) throw DomainError("multi-index not of this degree");
    return static_cast<std::size_t>(positions_[I]);
  }

  DomainPtr domain_;
  int degree_;
  std::vector<MultiIndex> indices_;
  std::vector<int> positions_;
  std::vector<std::vector<double>> coeffs_;
};

}  // namespace lqp
