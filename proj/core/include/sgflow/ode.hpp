#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "sgflow/diagnostics.hpp"
#include "sgflow/flow.hpp"

namespace sgflow {

/// psi: p = 6, Ψ = c·dvol_{ĝ_E} on a 4D base. beta: p = 3, β = b a constant
/// 0-form on a 7D base. scalar: any p, β = Ψ = 0.
enum class OdePreset { psi, beta, scalar };
std::string to_string(OdePreset p);
OdePreset parse_preset(const std::string& s);

/// Spatially constant reduced state with ĝ = s·ĝ_E and Ric(ĝ_E) = κ̂ ĝ_E.
struct HomogeneousState {
  OdePreset preset = OdePreset::scalar;
  int p = 6;
  double s = 1.0;
  double f = 0.0;
  double b = 0.0;
  double c = 0.0;
  double kappa = 0.0;
  double lambda = 0.0;
  int sigma = 1;
  double t = 0.0;

  void validate() const;
  static HomogeneousState psi_preset(double c, double kappa = 0.0, double lambda = 0.0, int sigma = 1);
  static HomogeneousState beta_preset(double b, double kappa = 0.0, double lambda = 0.0, int sigma = 1);
  static HomogeneousState scalar_preset(int p, double f, double lambda, int sigma = 1);
};

struct HomogeneousRhs {
  double ds = 0.0, df = 0.0, db = 0.0, dc = 0.0;
  double norm() const;
};

HomogeneousRhs homogeneous_rhs(const HomogeneousState& h);

/// Grid state on the homogeneous base grid (ĝ_E = identity), for comparison
/// with the PDE flow. Only κ̂ = 0 is representable on a flat periodic chart.
ReducedState to_reduced_state(const HomogeneousState& h);
/// Ricci of ĝ = s·ĝ_E for the scaled Einstein base: (κ̂/s) ĝ on the grid.
SymTensorField base_ricci(const HomogeneousState& h);

enum class OdeVar { s, f, b, c, kappa, lambda };
std::string to_string(OdeVar v);
OdeVar parse_ode_var(const std::string& s);

struct NewtonOptions {
  double tol = 1e-12;
  int max_iter = 100;
  double fd_step = 1e-6;
};

struct NewtonResult {
  HomogeneousState point;
  int iterations = 0;
  double rhs_norm = 0.0;
  std::vector<double> residual_history;
  /// Eigenvalues of ∂(ds, df, db, dc)/∂(s, f, b, c) restricted to the preset's
  /// active variables, by central differences at the returned point.
  std::vector<std::complex<double>> spectrum;
  /// Field-equation residuals of the lifted solution.
  double r1_sup = 0.0;
  double r2_sup = 0.0;
  bool certified = false;
};

/// Solves the preset's active equations (ds = df = 0, plus nothing for the
/// identically conserved coefficients) for the listed free variables.
/// Throws SingularJacobianError, or ConvergenceError after max_iter steps.
NewtonResult newton_stationary(const HomogeneousState& guess, const std::vector<OdeVar>& free,
                               const NewtonOptions& opt = {});

/// Linearization eigenvalues at a point (see NewtonResult::spectrum).
std::vector<std::complex<double>> linearization_spectrum(const HomogeneousState& h, double fd_step = 1e-6);

struct OdeSample {
  double t = 0.0;
  HomogeneousState state;
  HomogeneousRhs rhs;
};

struct OdeTrajectory {
  Termination cause = Termination::t_end_reached;
  double t = 0.0;
  long steps = 0;
  std::string quantity;
  double quantity_value = 0.0;
  int halvings = 0;
  std::vector<OdeSample> samples;
  HomogeneousState final_state;
};

struct OdeOptions {
  double dt = 1e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::rk4;
  double k_max = 1e6;
  long cadence = 1;
  int max_halvings = 20;
};

HomogeneousState ode_step(const HomogeneousState& h, double dt, Scheme scheme);
OdeTrajectory integrate_ode(const HomogeneousState& init, const OdeOptions& opt);

}  // namespace sgflow
