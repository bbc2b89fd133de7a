#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sgflow/fields.hpp"
#include "sgflow/geometry.hpp"

namespace sgflow {

enum class Scheme { euler, rk4 };
enum class Gauge { none, deturck, f_gauged };

std::string to_string(Scheme s);
std::string to_string(Gauge g);
Scheme parse_scheme(const std::string& s);
Gauge parse_gauge(const std::string& s);

struct EuclideanState {
  MetricField g;
  DifferentialForm F;
  int sigma = 1;
  double t = 0.0;
};

/// Warped-product data (ĝ, f, β, Ψ) on an n = 10 - p dimensional base.
/// β has degree 3 - p and Ψ degree 4; either is the empty zero form when
/// its degree falls outside [0, n].
struct ReducedState {
  MetricField ghat;
  ScalarField f;
  DifferentialForm beta;
  DifferentialForm psi;
  EinsteinFactor factor;
  double t = 0.0;

  int p() const noexcept { return factor.p(); }
  int sigma() const noexcept { return factor.sigma; }
  /// Checks n = 10 - p, degrees and grids.
  void validate() const;
  /// ĝ = I, f = 0, β = 0, Ψ = 0 on `grid` (whose dimension must be 10 - p).
  static ReducedState vacuum(const GridSpec& grid, const EinsteinFactor& factor);
};

struct EuclideanRhs {
  SymTensorField dg;
  DifferentialForm dF;

  void axpy(double a, const EuclideanRhs& o);
  bool all_finite() const;
  double sup_norm() const;
};

struct ReducedRhs {
  SymTensorField dghat;
  ScalarField df;
  DifferentialForm dbeta;
  DifferentialForm dpsi;

  void axpy(double a, const ReducedRhs& o);
  bool all_finite() const;
  double sup_norm() const;
};

/// DeTurck field W^k = g^{ij}(Γ^k_ij - Γ0^k_ij), its lowered form V_i and the
/// metric correction ∇_iV_j + ∇_jV_i.
struct DeTurck {
  VectorField W;
  VectorField V;
  SymTensorField lie_g;
};

DeTurck deturck_vector(const MetricField& g, const ChristoffelField& gamma, const ChristoffelField& gamma0);
DeTurck deturck_vector(const MetricField& g, const MetricField& g0);

/// L_X g = ∇_iX_j + ∇_jX_i for a vector field X^k.
SymTensorField lie_derivative_metric(const MetricField& g, const ChristoffelField& gamma, const VectorField& X);

/// ∂_t g = -2Ric + F² - |F|²g/3, ∂_t F = -□F - (σ/2) d⋆(F∧F). The F∧F term
/// only exists when 2 deg F + (deg F - 1) = n. DeTurck adds L_W g and L_W F
/// relative to `g0` (required for Gauge::deturck).
/// `gamma0` may carry the precomputed Christoffels of `g0`.
EuclideanRhs rhs_euclidean(const EuclideanState& s, Gauge gauge = Gauge::none, const MetricField* g0 = nullptr,
                           const ChristoffelField* gamma0 = nullptr);

/// Reduced flow. Gauge::none is the ungauged system; Gauge::f_gauged removes
/// the (p+1)∇²f term by the diffeomorphisms generated by -(p+1)∇f/2;
/// Gauge::deturck adds L_W to every field on top of f_gauged.
ReducedRhs rhs_reduced(const ReducedState& s, Gauge gauge = Gauge::none, const MetricField* g0 = nullptr,
                       const ChristoffelField* gamma0 = nullptr);

/// s + h * k; the metric is re-validated and may throw DegenerateMetricError.
EuclideanState advance(const EuclideanState& s, const EuclideanRhs& k, double h);
ReducedState advance(const ReducedState& s, const ReducedRhs& k, double h);

template <class State, class Rhs>
using RhsFunction = std::function<Rhs(const State&)>;

EuclideanState step(const EuclideanState& s, double dt, Scheme scheme,
                    const RhsFunction<EuclideanState, EuclideanRhs>& rhs);
ReducedState step(const ReducedState& s, double dt, Scheme scheme,
                  const RhsFunction<ReducedState, ReducedRhs>& rhs);

/// Estimate constants; none is fixed by the analysis, all default to 1.
struct ShiConstants {
  double A = 1.0;
  double A0 = 1.0;
  double A1 = 1.0;
  double A2 = 1.0;
  double B = 1.0;
  /// B_0 .. B_{m-1} of the reduced H quantity.
  std::vector<double> Bi{1.0, 1.0, 1.0};
  int m = 3;

  bool operator==(const ShiConstants&) const = default;
};

enum class ReferenceMetric { initial, flat };

struct FlowConfig {
  Scheme scheme = Scheme::rk4;
  /// Fixed step; 0 selects c_cfl times the diffusion limit and follows it
  /// downward at every cadence check.
  double dt = 0.0;
  double c_cfl = 0.5;
  double t_end = 1.0;
  Gauge gauge = Gauge::deturck;
  ReferenceMetric reference = ReferenceMetric::initial;
  double k_max = 1e6;
  int cadence = 1;
  int max_halvings = 20;
  bool force = false;
  bool freeze_metric = false;
  /// Steps between evaluations of sup|Rm| in the blow-up monitor.
  int curvature_every = 1;
  ShiConstants shi;

  void validate() const;
  bool operator==(const FlowConfig&) const = default;
};

/// c_cfl h_min² / (2n λ_max(g^{-1})); +inf on a grid without resolved axes.
double cfl_limit(const MetricField& g, double c_cfl);

enum class Termination { t_end_reached, blow_up, positivity_lost, cfl_violation };
std::string to_string(Termination t);

/// Sup of |Rm| + |f| + |β| + |Ψ| (reduced) or |Rm| + |F| (Euclidean) and the
/// largest contribution. Non-finite entries name the offending field.
struct BlowUpMonitor {
  double total = 0.0;
  std::string dominant;
  bool finite = true;
};
BlowUpMonitor blow_up_quantity(const ReducedState& s, bool with_curvature);
BlowUpMonitor blow_up_quantity(const EuclideanState& s, bool with_curvature);

template <class State>
struct RunResult {
  Termination cause = Termination::t_end_reached;
  double t = 0.0;
  long steps = 0;
  /// Field responsible for blow-up.
  std::string quantity;
  double quantity_value = 0.0;
  /// (t, dt) whenever dt changes, starting with the initial step.
  std::vector<std::pair<double, double>> dt_history;
  int halvings = 0;
  double dt_cfl = 0.0;
  bool cfl_exceeded = false;
  State final_state;
};

/// Called at step 0, every `cadence` accepted steps and at the final state.
template <class State>
using Observer = std::function<void(const State& s, long step, double dt)>;

RunResult<ReducedState> run_flow(const ReducedState& init, const FlowConfig& cfg,
                                 const Observer<ReducedState>& observe = {});
RunResult<EuclideanState> run_flow(const EuclideanState& init, const FlowConfig& cfg,
                                   const Observer<EuclideanState>& observe = {});

/// Right-hand side closure honouring gauge, reference metric and freeze_metric.
RhsFunction<ReducedState, ReducedRhs> make_rhs(const ReducedState& init, const FlowConfig& cfg);
RhsFunction<EuclideanState, EuclideanRhs> make_rhs(const EuclideanState& init, const FlowConfig& cfg);

DifferentialForm as_form(const ScalarField& f);

}  // namespace sgflow
