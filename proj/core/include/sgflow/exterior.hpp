#pragma once

#include <cstdint>
#include <vector>

#include "sgflow/grid.hpp"

namespace sgflow {

using Mask = std::uint32_t;

/// C(n, k); zero when k < 0 or k > n.
int binomial(int n, int k);

/// Sign of the permutation sorting the concatenation (a, b) of two increasing
/// index sets; 0 when they overlap.
int merge_sign(Mask a, Mask b);

inline int popcount(Mask m) { return __builtin_popcount(m); }

/// Strictly increasing multi-indices of Λ^k(R^n), in lexicographic order.
/// Tables are built once per n and shared.
class ExteriorBasis {
 public:
  static const ExteriorBasis& get(int n);

  int dim() const noexcept { return n_; }
  int count(int k) const { return (k < 0 || k > n_) ? 0 : static_cast<int>(masks_[k].size()); }
  Mask mask(int k, int idx) const { return masks_[k][idx]; }
  /// Position of `m` within its degree.
  int index(Mask m) const { return index_[m]; }
  const std::vector<Mask>& masks(int k) const { return masks_[k]; }
  Mask full() const noexcept { return (Mask{1} << n_) - 1; }

  /// Axes of a mask, increasing.
  static int axes(Mask m, int* out);

 private:
  explicit ExteriorBasis(int n);

  int n_;
  std::vector<std::vector<Mask>> masks_;
  std::vector<int> index_;
};

}  // namespace sgflow
