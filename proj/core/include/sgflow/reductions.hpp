#pragma once

#include <optional>

#include "sgflow/block.hpp"
#include "sgflow/flow.hpp"

namespace sgflow {

/// Warped product g = e^f g̃ + ĝ, F = dvol_g̃∧β + Ψ held block by block.
struct BlockState {
  /// e^f
  ScalarField fiber_coeff;
  /// f itself, kept so that reduce() inverts lift_state() exactly.
  ScalarField warp;
  MetricField ghat;
  /// F = base + dvol_g̃∧fiber with base = Ψ and fiber = β.
  BlockForm F;
  EinsteinFactor factor;
  double t = 0.0;
};

BlockState lift_state(const ReducedState& s);
ReducedState reduce(const BlockState& b);

/// Sup-norm discrepancies between the reduced right-hand side written in
/// blocks and the (p+1+n)-dimensional flow evaluated blockwise.
struct LiftReport {
  double g_ab = 0.0;
  double g_ij = 0.0;
  double F_beta = 0.0;
  double F_psi = 0.0;
  /// Mixed block F²_ai, nonzero only for p = 0 with β and ι Ψ overlapping.
  double g_mixed = 0.0;
  double max() const;
};

/// The reduced side is the ungauged system; the product side uses the
/// u = e^{f/2} curvature route and block Hodge operators, so the two agree
/// exactly on derivative-free states and to second order otherwise.
LiftReport lift_consistency_check(const ReducedState& s);

/// Reduced right-hand side assembled from the one-form-field systems:
/// Ψ = 0 (β only) or β = 0 (Ψ only).
ReducedRhs rhs_beta_only(const ReducedState& s);
ReducedRhs rhs_psi_only(const ReducedState& s);

struct SpecializationReport {
  /// Discrepancies are sup-norm differences divided by max(1, sup|rhs_reduced|).
  /// rhs_beta_only vs rhs_reduced, present when Ψ = 0.
  std::optional<double> beta_path;
  /// rhs_psi_only vs rhs_reduced, present when β = 0.
  std::optional<double> psi_path;
};
SpecializationReport specialization_check(const ReducedState& s);

/// Ψ-only runs need n = 10 - p <= 7 for Ψ∧Ψ to vanish identically.
void validate_psi_only(int p);

}  // namespace sgflow
