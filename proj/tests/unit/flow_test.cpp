#include <gtest/gtest.h>

#include <cmath>

#include "sgflow/error.hpp"
#include "sgflow/flow.hpp"
#include "sgflow/forms.hpp"
#include "test_util.hpp"

namespace sgflow {
namespace {

using fixtures::kTwoPi;
using fixtures::factor_for;
using fixtures::reduced_grid;
using fixtures::smooth_reduced;

ReducedState homogeneous_f(int p, double lambda, double f0) {
  ReducedState s = ReducedState::vacuum(GridSpec::homogeneous(10 - p), factor_for(p, 1, lambda));
  s.f[0] = f0;
  return s;
}

TEST(ReducedRhs, VacuumIsStatic) {
  for (int p : {0, 3, 6, 7}) {
    const ReducedState s = ReducedState::vacuum(reduced_grid(p, 2, 6), factor_for(p));
    for (Gauge g : {Gauge::none, Gauge::f_gauged}) EXPECT_EQ(rhs_reduced(s, g).sup_norm(), 0.0);
    EXPECT_EQ(rhs_reduced(s, Gauge::deturck, &s.ghat).sup_norm(), 0.0);
  }
}

TEST(ReducedRhs, HomogeneousWarpFunction) {
  const ReducedState s = homogeneous_f(7, 1.0, 0.4);
  const ReducedRhs k = rhs_reduced(s);
  EXPECT_NEAR(k.df[0], -2.0 * std::exp(-0.4), 1e-15);
  EXPECT_EQ(k.dghat.sup_norm(), 0.0);
}

TEST(ReducedRhs, HighPHasNoBetaChannels) {
  for (int p = 4; p <= 10; ++p) {
    const ReducedState s = ReducedState::vacuum(GridSpec::homogeneous(10 - p), factor_for(p));
    EXPECT_TRUE(s.beta.empty());
    EXPECT_TRUE(rhs_reduced(s).dbeta.empty());
    if (10 - p < 4) EXPECT_TRUE(s.psi.empty());
  }
}

TEST(ReducedRhs, RejectsWrongBaseDimension) {
  EXPECT_THROW(ReducedState::vacuum(GridSpec::homogeneous(4), factor_for(7)), ShapeError);
}

TEST(ReducedRhs, GaugeDifferenceIsLieDerivativeAlongGradient) {
  const ReducedState s = smooth_reduced(2, 3, 8, 1, -1.0, 5);
  const double c = s.factor.c();
  const ReducedRhs a = rhs_reduced(s, Gauge::none);
  const ReducedRhs b = rhs_reduced(s, Gauge::f_gauged);
  const Hessian H = hessian_and_laplacian(s.ghat, s.f);
  const int n = s.ghat.dim();
  VectorField X(s.ghat.grid());
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (std::size_t q = 0; q < X.points(); ++q)
        X.component(k)[q] -= c * s.ghat.ginv(k, l, q) * H.df.component(l)[q];

  DifferentialForm diff_beta = b.dbeta - a.dbeta;
  diff_beta -= lie_derivative(X, s.beta);
  EXPECT_LE(diff_beta.sup_norm(), 1e-10 * (1.0 + a.dbeta.sup_norm()));
  DifferentialForm diff_psi = b.dpsi - a.dpsi;
  diff_psi -= lie_derivative(X, s.psi);
  EXPECT_LE(diff_psi.sup_norm(), 1e-10 * (1.0 + a.dpsi.sup_norm()));
  ScalarField diff_f = b.df;
  diff_f -= a.df;
  for (std::size_t q = 0; q < diff_f.points(); ++q) diff_f[q] += c * H.gradsq[q];
  EXPECT_LE(diff_f.sup_norm(), 1e-13);
}

TEST(ReducedRhs, GaugeDifferenceOnMetricIsSecondOrder) {
  double err[2];
  for (int r = 0; r < 2; ++r) {
    const ReducedState s = smooth_reduced(7, 3, 16 << r, 1, 0.0, 9);
    const ReducedRhs a = rhs_reduced(s, Gauge::none);
    const ReducedRhs b = rhs_reduced(s, Gauge::f_gauged);
    const ChristoffelField gamma = christoffels(s.ghat);
    const Hessian H = hessian_and_laplacian(s.ghat, gamma, s.f);
    VectorField X(s.ghat.grid());
    const int n = s.ghat.dim();
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (std::size_t q = 0; q < X.points(); ++q)
          X.component(k)[q] -= s.factor.c() * s.ghat.ginv(k, l, q) * H.df.component(l)[q];
    SymTensorField d = b.dghat;
    d -= a.dghat;
    d -= lie_derivative_metric(s.ghat, gamma, X);
    err[r] = d.sup_norm();
  }
  EXPECT_NEAR(std::log2(err[0] / err[1]), 2.0, 0.2);
}

TEST(ReducedRhs, StationaryStateWithoutGradientIsGaugeInvariant) {
  ReducedState s = ReducedState::vacuum(reduced_grid(6, 4, 4), factor_for(6, 1, -1.0 / 6.0));
  const double kappa = 0.0;
  (void)kappa;
  s.psi = DifferentialForm::basis_form(s.ghat.grid(), 0b1111, 1.0);
  const ReducedRhs a = rhs_reduced(s, Gauge::none);
  const ReducedRhs b = rhs_reduced(s, Gauge::deturck, &s.ghat);
  const ReducedRhs c = rhs_reduced(s, Gauge::f_gauged);
  ReducedRhs d = b;
  d.axpy(-1.0, a);
  EXPECT_EQ(d.sup_norm(), 0.0);
  d = c;
  d.axpy(-1.0, a);
  EXPECT_EQ(d.sup_norm(), 0.0);
}

TEST(EuclideanRhs, FlatVacuumIsStatic) {
  const GridSpec grid = GridSpec::cube(4, 4);
  const EuclideanState s{MetricField::flat(grid), DifferentialForm(grid, 4), 1, 0.0};
  EXPECT_EQ(rhs_euclidean(s).sup_norm(), 0.0);
}

TEST(EuclideanRhs, ConstantTopForm) {
  const GridSpec grid = GridSpec::cube(4, 4);
  const double c = 1.7;
  for (int sigma : {1, -1}) {
    const EuclideanState s{MetricField::flat(grid), DifferentialForm::basis_form(grid, 0b1111, c), sigma, 0.0};
    const EuclideanRhs k = rhs_euclidean(s, Gauge::deturck, &s.g);
    EXPECT_EQ(k.dF.sup_norm(), 0.0);
    SymTensorField expect = SymTensorField::identity(grid, 2.0 / 3.0 * c * c);
    expect -= k.dg;
    EXPECT_LE(expect.sup_norm(), 1e-14);
  }
}

TEST(EuclideanRhs, RejectsFGauge) {
  const GridSpec grid = GridSpec::cube(3, 4);
  const EuclideanState s{MetricField::flat(grid), DifferentialForm(grid, 2), 1, 0.0};
  EXPECT_THROW(rhs_euclidean(s, Gauge::f_gauged), ConfigError);
}

TEST(DeTurck, VanishesOnReference) {
  const GridSpec grid = GridSpec::cube(3, 8);
  const MetricField g = fixtures::smooth_metric(grid, 0.2);
  const DeTurck d = deturck_vector(g, g);
  EXPECT_EQ(d.W.sup_norm(), 0.0);
  EXPECT_EQ(d.lie_g.sup_norm(), 0.0);
}

TEST(DeTurck, VanishesUnderConstantScaling) {
  const GridSpec grid = GridSpec::cube(3, 8);
  const DeTurck d = deturck_vector(MetricField::flat(grid, 3.0), MetricField::flat(grid));
  EXPECT_EQ(d.V.sup_norm(), 0.0);
}

TEST(DeTurck, OneDimensionalProfile) {
  double err[2];
  for (int r = 0; r < 2; ++r) {
    const GridSpec grid({32 << r, 1, 1}, {1.0, 1.0, 1.0});
    SymTensorField t = SymTensorField::identity(grid);
    const ScalarField a = fixtures::sample(grid, [](const double* x) { return 1.0 + 0.3 * std::sin(kTwoPi * x[0]); });
    std::copy(a.raw().begin(), a.raw().end(), t.component(0, 0));
    const DeTurck d = deturck_vector(MetricField(t), MetricField::flat(grid));
    double e = 0.0;
    for (std::size_t q = 0; q < grid.size(); ++q) {
      const double x = grid.coordinate(q, 0);
      const double ap = 0.3 * kTwoPi * std::cos(kTwoPi * x);
      e = std::max(e, std::abs(d.V.component(0)[q] - 0.5 * ap / a[q]));
    }
    EXPECT_LE(std::max(d.V.component(1)[0], d.V.component(2)[0]), 0.0);
    err[r] = e;
  }
  EXPECT_NEAR(std::log2(err[0] / err[1]), 2.0, 0.2);
}

TEST(Step, ZeroRhsLeavesStateUnchanged) {
  const ReducedState s = smooth_reduced(7, 3, 6, 1, 0.0, 3);
  const RhsFunction<ReducedState, ReducedRhs> zero = [](const ReducedState& x) {
    return ReducedRhs{SymTensorField(x.ghat.grid()), ScalarField(x.ghat.grid()),
                      DifferentialForm(x.ghat.grid(), x.beta.degree()), DifferentialForm(x.ghat.grid(), 4)};
  };
  for (Scheme sc : {Scheme::euler, Scheme::rk4}) {
    const ReducedState t = step(s, 0.1, sc, zero);
    EXPECT_EQ(t.ghat.tensor().raw(), s.ghat.tensor().raw());
    EXPECT_EQ(t.f.raw(), s.f.raw());
    EXPECT_DOUBLE_EQ(t.t, 0.1);
  }
}

TEST(Step, EulerHeatMatchesFivePointStencil) {
  const GridSpec grid = GridSpec::cube(2, 16);
  ReducedState s = ReducedState::vacuum(grid, factor_for(8));
  s.f = fixtures::sample(grid, [](const double* x) { return 0.3 * std::sin(kTwoPi * x[0]) * std::cos(kTwoPi * x[1]); });
  FlowConfig cfg;
  cfg.gauge = Gauge::f_gauged;
  cfg.freeze_metric = true;
  const double dt = 1e-4;
  const ReducedState t = step(s, dt, Scheme::euler, make_rhs(s, cfg));
  const int m = 16;
  const double h2 = 1.0 / (m * m);
  double e = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      auto at = [&](int a, int b) { return s.f[((a + m) % m) * m + (b + m) % m]; };
      const double lap = (at(i + 1, j) - 2 * at(i, j) + at(i - 1, j)) / h2 + (at(i, j + 1) - 2 * at(i, j) + at(i, j - 1)) / h2;
      e = std::max(e, std::abs(t.f[i * m + j] - (at(i, j) + dt * lap)));
    }
  }
  EXPECT_LE(e, 1e-15);
  EXPECT_EQ(t.ghat.tensor().raw(), s.ghat.tensor().raw());
}

TEST(Step, Rk4FourthOrderOnWarpOde) {
  double err[3];
  for (int r = 0; r < 3; ++r) {
    const double dt = 0.0125 / (1 << r);
    ReducedState s = homogeneous_f(7, 1.0, 0.0);
    FlowConfig cfg;
    const auto rhs = make_rhs(s, cfg);
    for (int k = 0; k < (20 << r); ++k) s = step(s, dt, Scheme::rk4, rhs);
    err[r] = std::abs(s.f[0] - std::log(1.0 - 2.0 * 0.25));
  }
  EXPECT_NEAR(std::log2(err[0] / err[1]), 4.0, 0.3);
  EXPECT_NEAR(std::log2(err[1] / err[2]), 4.0, 0.3);
}

TEST(RunFlow, VacuumReachesEnd) {
  FlowConfig cfg;
  cfg.dt = 0.1;
  const auto r = run_flow(ReducedState::vacuum(GridSpec::homogeneous(3), factor_for(7)), cfg);
  EXPECT_EQ(r.cause, Termination::t_end_reached);
  EXPECT_DOUBLE_EQ(r.t, 1.0);
  EXPECT_EQ(r.steps, 10);
}

TEST(RunFlow, PositiveLambdaBlowsUpAtOneHalf) {
  FlowConfig cfg;
  cfg.dt = 1e-3;
  const auto r = run_flow(homogeneous_f(7, 1.0, 0.0), cfg);
  EXPECT_EQ(r.cause, Termination::blow_up);
  EXPECT_EQ(r.quantity, "f");
  EXPECT_NEAR(r.t, 0.5, 0.01);
  EXPECT_EQ(r.halvings, 20);
}

TEST(RunFlow, NegativeLambdaMatchesClosedForm) {
  FlowConfig cfg;
  cfg.dt = 1e-3;
  const auto r = run_flow(homogeneous_f(7, -1.0, 0.0), cfg);
  EXPECT_EQ(r.cause, Termination::t_end_reached);
  EXPECT_NEAR(r.final_state.f[0], std::log(3.0), 1e-6);
}

TEST(RunFlow, CadenceRecordCount) {
  FlowConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 0.37;
  cfg.cadence = 5;
  std::vector<double> times;
  const auto r = run_flow(homogeneous_f(7, -1.0, 0.0), cfg,
                          [&](const ReducedState& s, long, double) { times.push_back(s.t); });
  EXPECT_EQ(r.steps, 37);
  EXPECT_EQ(times.size(), 9u);
  for (std::size_t i = 1; i < times.size(); ++i) EXPECT_GT(times[i], times[i - 1]);
}

TEST(RunFlow, CflViolationStopsUnlessForced) {
  const ReducedState s = ReducedState::vacuum(GridSpec::cube(2, 16), factor_for(8));
  FlowConfig cfg;
  cfg.dt = 1.0;
  cfg.t_end = 1.0;
  EXPECT_EQ(run_flow(s, cfg).cause, Termination::cfl_violation);
  cfg.force = true;
  const auto r = run_flow(s, cfg);
  EXPECT_TRUE(r.cfl_exceeded);
  EXPECT_EQ(r.cause, Termination::t_end_reached);
}

TEST(RunFlow, AutomaticStepFollowsShrinkingLimit) {
  // A constant 1-form β contracts the metric along itself, so the diffusion
  // limit decreases as the run proceeds.
  const GridSpec grid = reduced_grid(2, 2, 8);
  ReducedState s = ReducedState::vacuum(grid, factor_for(2));
  s.beta = DifferentialForm::basis_form(grid, 0b1, 2.0);
  FlowConfig cfg;
  cfg.t_end = 0.01;
  cfg.gauge = Gauge::none;
  const auto r = run_flow(s, cfg);
  EXPECT_EQ(r.cause, Termination::t_end_reached);
  EXPECT_FALSE(r.cfl_exceeded);
  ASSERT_GT(r.dt_history.size(), 1u);
  for (std::size_t i = 1; i < r.dt_history.size(); ++i) EXPECT_LE(r.dt_history[i].second, r.dt_history[i - 1].second);
}

TEST(RunFlow, PositivityLoss) {
  const GridSpec grid = GridSpec::homogeneous(3);
  const EuclideanState s{MetricField::flat(grid), DifferentialForm::basis_form(grid, 0b001, 3.0), 1, 0.0};
  FlowConfig cfg;
  cfg.scheme = Scheme::euler;
  cfg.dt = 1.0;
  cfg.max_halvings = 0;
  EXPECT_EQ(run_flow(s, cfg).cause, Termination::positivity_lost);
  cfg.max_halvings = 20;
  EXPECT_EQ(run_flow(s, cfg).cause, Termination::t_end_reached);
}

TEST(Closedness, ReducedFormsStayClosed) {
  ReducedState s = smooth_reduced(2, 3, 6, 1, -1.0, 11);
  FlowConfig cfg;
  cfg.t_end = 20 * cfl_limit(s.ghat, 0.5);
  const auto r = run_flow(s, cfg);
  ASSERT_EQ(r.cause, Termination::t_end_reached);
  EXPECT_GE(r.steps, 20);
  EXPECT_LE(exterior_derivative(r.final_state.beta).sup_norm(), 1e-10);
  EXPECT_LE(exterior_derivative(r.final_state.psi).sup_norm(), 1e-10);
  EXPECT_GT(r.final_state.psi.sup_norm(), 0.0);
}

TEST(Closedness, EuclideanFormStaysClosed) {
  const GridSpec grid = GridSpec::cube(3, 8);
  const EuclideanState s{fixtures::smooth_metric(grid, 0.2), fixtures::closed_form(grid, 2, 0.5, 4), 1, 0.0};
  FlowConfig cfg;
  cfg.t_end = 50 * cfl_limit(s.g, 0.5);
  const auto r = run_flow(s, cfg);
  ASSERT_EQ(r.cause, Termination::t_end_reached);
  EXPECT_LE(exterior_derivative(r.final_state.F).sup_norm(), 1e-10);
}

}  // namespace
}  // namespace sgflow
