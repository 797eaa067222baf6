#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "lqp/core/error.hpp"

namespace lqp {

/// Increasing multi-index stored as a bitmask of axes (bit a set <=> dx_a present).
using MultiIndex = std::uint32_t;

inline constexpr int max_dimension = 16;

inline int index_degree(MultiIndex I) { return std::popcount(I); }

inline bool has_axis(MultiIndex I, int axis) { return ((I >> axis) & 1u) != 0u; }

/// Sign s with dx_axis ^ dx_I = s dx_{I + axis}; axis must not be in I.
inline int wedge_sign(int axis, MultiIndex I) {
  const MultiIndex below = I & ((MultiIndex{1} << axis) - 1u);
  return (std::popcount(below) % 2 == 0) ? 1 : -1;
}

inline std::vector<int> axes_of(MultiIndex I) {
  std::vector<int> out;
  for (int a = 0; I != 0u; ++a, I >>= 1)
    if (I & 1u) out.push_back(a);
  return out;
}

inline MultiIndex mask_of(const std::vector<int>& axes) {
  MultiIndex I = 0;
  for (int a : axes) I |= MultiIndex{1} << a;
  return I;
}

inline std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

/// All increasing k-tuples of {0..dim-1}, in lexicographic order of the tuples.
inline std::vector<MultiIndex> increasing_indices(int dim, int k) {
  if (dim < 0 || dim > max_dimension) throw DomainError("dimension out of range");
  std::vector<MultiIndex> out;
  if (k < 0 || k > dim) return out;
  std::vector<int> tuple(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) tuple[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(mask_of(tuple));
    int i = k - 1;
    while (i >= 0 && tuple[static_cast<std::size_t>(i)] == dim - k + i) --i;
    if (i < 0) break;
    ++tuple[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) tuple[static_cast<std::size_t>(j)] = tuple[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

/// Lookup from bitmask to position in increasing_indices(dim, k); -1 if absent.
inline std::vector<int> index_positions(int dim, int k) {
  std::vector<int> pos(std::size_t{1} << dim, -1);
  const auto list = increasing_indices(dim, k);
  for (std::size_t i = 0; i < list.size(); ++i) pos[list[i]] = static_cast<int>(i);
  return pos;
}

}  // namespace lqp
