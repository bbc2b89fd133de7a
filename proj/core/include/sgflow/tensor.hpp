#pragma once

#include <vector>

#include "sgflow/fields.hpp"

namespace sgflow {

/// Γ^k_ij, symmetric in (i, j).
class ChristoffelField : public GridData {
 public:
  ChristoffelField() = default;
  explicit ChristoffelField(const GridSpec& grid)
      : GridData(grid, grid.dim() * (grid.dim() * (grid.dim() + 1) / 2)) {}
  int dim() const noexcept { return grid_.dim(); }
  double* component(int k, int i, int j) {
    return channel(k * (dim() * (dim() + 1) / 2) + SymTensorField::index(dim(), i, j));
  }
  const double* component(int k, int i, int j) const {
    return channel(k * (dim() * (dim() + 1) / 2) + SymTensorField::index(dim(), i, j));
  }
};

/// Covariant tensor organised in slots. A slot of arity a holds a
/// antisymmetric indices stored over increasing multi-indices (arity 1 is a
/// plain index). Channels are laid out mixed-radix with the first slot most
/// significant. The pointwise norm is weight * sum over basis channels of
/// T_A T_B prod_s G_{a_s}[A_s][B_s], so a single slot of arity k reproduces
/// the form norm and slots {2,2} with weight 4 give the full contraction of
/// a curvature tensor.
class TensorField : public GridData {
 public:
  TensorField() = default;
  TensorField(const GridSpec& grid, std::vector<int> slots, double weight = 1.0);

  const std::vector<int>& slots() const noexcept { return slots_; }
  double weight() const noexcept { return weight_; }
  /// Basis size of slot s.
  int slot_size(int s) const { return binomial(grid_.dim(), slots_[s]); }
  /// Channel from per-slot basis positions.
  int channel_index(const int* pos) const;

  static TensorField from_scalar(const ScalarField& f);
  static TensorField from_form(const DifferentialForm& a);
  static TensorField from_symmetric(const SymTensorField& t);

 private:
  std::vector<int> slots_;
  double weight_ = 1.0;
};

/// ∇T with the new index in a leading arity-1 slot.
TensorField covariant_derivative(const ChristoffelField& gamma, const TensorField& T);
/// Repeated covariant derivative.
TensorField covariant_derivative(const ChristoffelField& gamma, const TensorField& T, int order);

ScalarField norm_squared(const MetricField& g, const TensorField& T);
double sup_norm_squared(const MetricField& g, const TensorField& T);

}  // namespace sgflow
