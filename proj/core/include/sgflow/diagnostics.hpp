#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgflow/block.hpp"
#include "sgflow/flow.hpp"

namespace sgflow {

/// r1 = d⋆F - ½F∧F and r2 = Ric - ½F² + |F|²g/6 on the grid. The F∧F term
/// only enters when its degree matches d⋆F (n = 3 deg F - 1).
struct FieldResidual {
  DifferentialForm r1;
  SymTensorField r2;
  double r1_sup = 0.0;
  double r2_sup = 0.0;
};
FieldResidual field_equation_residual(const MetricField& g, const DifferentialForm& F, int sigma,
                                      const SymTensorField* ricci_override = nullptr);

/// Same equations for the warped product g = e^f g̃ + ĝ, F = dvol_g̃∧β + Ψ,
/// evaluated block by block. `base_ricci` replaces Ric(ĝ) when given.
struct ReducedFieldResidual {
  BlockForm r1;
  /// r2_ab = r2_ab_coeff g̃_ab
  ScalarField r2_ab_coeff;
  SymTensorField r2_ij;
  double r1_sup = 0.0;
  double r2_ab_sup = 0.0;
  double r2_ij_sup = 0.0;
  /// Sup of the full pointwise norm of r2.
  double r2_sup = 0.0;
};
ReducedFieldResidual field_equation_residual(const ReducedState& s, const SymTensorField* base_ricci = nullptr);

/// r2 evaluated through a direct per-point contraction, independent of
/// form_square; used to cross-check the grid residual.
SymTensorField einstein_residual_direct(const MetricField& g, const SymTensorField& ric, const DifferentialForm& F);

/// α = ⋆d⋆F - ½⋆(F∧F); sup norms of α, dα and d†α.
struct AlphaCheck {
  double alpha = 0.0;
  double d_alpha = 0.0;
  double codiff_alpha = 0.0;
};
AlphaCheck alpha_form_check(const MetricField& g, const DifferentialForm& F, int sigma);
AlphaCheck alpha_form_check(const ReducedState& s);

/// G_1..G_m for the Euclidean flow, suprema over the grid.
struct EuclideanShi {
  int m = 3;
  std::vector<double> G;  ///< G[i-1] = G_i
};
EuclideanShi shi_quantities(const EuclideanState& s, const ShiConstants& k);

/// G_0..G_m and H for the reduced flow.
struct ReducedShi {
  int m = 3;
  std::vector<double> G;  ///< G[i] = G_i
  double H = 0.0;
};
ReducedShi shi_quantities(const ReducedState& s, const ShiConstants& k);

struct ActionValue {
  double value = 0.0;
  double einstein = 0.0;
  double kinetic = 0.0;
  double chern_simons = 0.0;
  bool chern_simons_included = false;
};
/// Riemann sum of (R - ½|F|²) sqrt(det g) plus ∫F∧F∧A/6 when a potential A
/// with dA = F (to 1e-8) is supplied and F∧F∧A is a top form.
ActionValue action(const MetricField& g, const DifferentialForm& F, const DifferentialForm* potential = nullptr,
                   const SymTensorField* ricci_override = nullptr);
/// Action density of the warped product per unit volume of g̃.
ActionValue action(const ReducedState& s, const SymTensorField* base_ricci = nullptr);

struct ExtremumSample {
  long step = 0;
  double t = 0.0;
  double max = 0.0;
  double min = 0.0;
};
struct ExtremumViolation {
  long step = 0;
  double t = 0.0;
  std::string kind;  ///< "max_increase" or "min_decrease"
  double change = 0.0;
  double tolerance = 0.0;
};
/// Steps where max f rose or min f fell by more than 10(dt + h²)(1 + sup|f|).
std::vector<ExtremumViolation> extremum_monitor(const std::vector<ExtremumSample>& samples, double dt, double h);
ExtremumSample extremum_sample(const ScalarField& f, long step, double t);

struct DiagnosticsOptions {
  bool curvature = true;
  bool field_equations = true;
  bool alpha = true;
  bool shi = true;
  bool action = true;
  ShiConstants constants;
  const SymTensorField* base_ricci = nullptr;
};

/// One record per emitted step. Entries that do not apply to the state type
/// stay empty.
struct DiagnosticsRecord {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  std::optional<double> sup_rm, sup_f, sup_beta, sup_psi, sup_F, sup_grad_F, sup_grad_f;
  std::optional<double> closed_beta, closed_psi, closed_F;
  std::optional<double> r1, r2;
  std::optional<double> stationary;
  std::map<std::string, double> shi;
  std::optional<double> action;
  std::optional<double> d_alpha, codiff_alpha;
  std::optional<double> c0;
  std::optional<int> shi_m;
};

DiagnosticsRecord make_record(const ReducedState& s, long step, double dt, const DiagnosticsOptions& opt,
                              const RhsFunction<ReducedState, ReducedRhs>* rhs = nullptr);
DiagnosticsRecord make_record(const EuclideanState& s, long step, double dt, const DiagnosticsOptions& opt,
                              const RhsFunction<EuclideanState, EuclideanRhs>* rhs = nullptr);

/// Sup of |⟨F, d⋆(F∧F)⟩| over sup of |∇F||F|²; empty when the F∧F term does
/// not exist for this degree.
std::optional<double> c0_ratio(const MetricField& g, const DifferentialForm& F, int sigma);

/// Pointwise |t|_g for a symmetric 2-tensor.
ScalarField symmetric_norm(const MetricField& g, const SymTensorField& t);

}  // namespace sgflow
