#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sgflow/error.hpp"
#include "sgflow/ode.hpp"

namespace sgflow {
namespace {

TEST(HomogeneousRhs, VacuumIsZero) {
  EXPECT_EQ(homogeneous_rhs(HomogeneousState::psi_preset(0.0)).norm(), 0.0);
  EXPECT_EQ(homogeneous_rhs(HomogeneousState::scalar_preset(7, 0.0, 0.0)).norm(), 0.0);
}

TEST(HomogeneousRhs, PureLambda) {
  const HomogeneousRhs r = homogeneous_rhs(HomogeneousState::scalar_preset(7, 0.3, 1.0));
  EXPECT_DOUBLE_EQ(r.df, -2.0 * std::exp(-0.3));
  EXPECT_EQ(r.ds, 0.0);
}

TEST(HomogeneousRhs, PresetValidation) {
  HomogeneousState h = HomogeneousState::psi_preset(1.0);
  h.p = 5;
  EXPECT_THROW(homogeneous_rhs(h), ConfigError);
  h = HomogeneousState::scalar_preset(6, 0.0, 0.0);
  h.c = 1.0;
  EXPECT_THROW(homogeneous_rhs(h), ConfigError);
  h = HomogeneousState::beta_preset(1.0);
  h.s = -1.0;
  EXPECT_THROW(homogeneous_rhs(h), ConfigError);
}

TEST(HomogeneousRhs, MatchesGridFlowOnConstantFields) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    for (OdePreset preset : {OdePreset::psi, OdePreset::beta, OdePreset::scalar}) {
      const int sigma = (trial % 2) ? 1 : -1;
      HomogeneousState h = preset == OdePreset::psi    ? HomogeneousState::psi_preset(u(rng), 0.0, u(rng), sigma)
                           : preset == OdePreset::beta ? HomogeneousState::beta_preset(u(rng), 0.0, u(rng), sigma)
                                                       : HomogeneousState::scalar_preset(trial % 11, 0.0, u(rng), sigma);
      h.s = 1.0 + 0.5 * u(rng);
      h.f = 0.5 * u(rng);
      const HomogeneousRhs o = homogeneous_rhs(h);
      for (Gauge gauge : {Gauge::none, Gauge::f_gauged}) {
        const ReducedRhs k = rhs_reduced(to_reduced_state(h), gauge);
        const int n = 10 - h.p;
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) EXPECT_NEAR(k.dghat.component(i, j)[0], i == j ? o.ds : 0.0, 1e-12);
        }
        EXPECT_NEAR(k.df[0], o.df, 1e-12);
        if (preset == OdePreset::beta) EXPECT_NEAR(k.dbeta.channel(0)[0], o.db, 1e-12);
        if (preset == OdePreset::psi) EXPECT_NEAR(k.dpsi.channel(0)[0], o.dc, 1e-12);
      }
    }
  }
}

TEST(Newton, VacuumGuessReturnsVacuum) {
  const NewtonResult r = newton_stationary(HomogeneousState::psi_preset(0.0), {OdeVar::s, OdeVar::f});
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.point.s, 1.0);
  EXPECT_EQ(r.point.f, 0.0);
  EXPECT_TRUE(r.certified);
}

TEST(Newton, FreundRubinBranchFromParameters) {
  const NewtonResult r = newton_stationary(HomogeneousState::psi_preset(1.0, 0.5, 0.2), {OdeVar::kappa, OdeVar::lambda});
  EXPECT_LE(r.iterations, 20);
  EXPECT_NEAR(r.point.kappa, 1.0 / 3.0, 1e-10);
  EXPECT_NEAR(r.point.lambda, -1.0 / 6.0, 1e-10);
  EXPECT_LE(r.rhs_norm, 1e-12);
  EXPECT_LE(r.r1_sup, 1e-10);
  EXPECT_LE(r.r2_sup, 1e-10);
  EXPECT_TRUE(r.certified);
  EXPECT_EQ(r.spectrum.size(), 3u);
}

TEST(Newton, FreundRubinBranchFromShape) {
  HomogeneousState g = HomogeneousState::psi_preset(1.0, 1.0 / 3.0, -1.0 / 6.0);
  g.s = 1.2;
  g.f = 0.15;
  const NewtonResult r = newton_stationary(g, {OdeVar::s, OdeVar::f});
  EXPECT_LE(r.iterations, 20);
  EXPECT_NEAR(r.point.s, 1.0, 1e-10);
  EXPECT_NEAR(r.point.f, 0.0, 1e-10);
  EXPECT_TRUE(r.certified);
  // Linearization at the branch: ∂ds/∂s = -2c²/s⁴, ∂df/∂f = 2λe^{-f}, c conserved.
  ASSERT_EQ(r.spectrum.size(), 3u);
  EXPECT_NEAR(r.spectrum[0].real(), -2.0, 1e-6);
  EXPECT_NEAR(r.spectrum[1].real(), -1.0 / 3.0, 1e-6);
  EXPECT_NEAR(std::abs(r.spectrum[2]), 0.0, 1e-6);
}

TEST(Newton, SingularJacobian) {
  EXPECT_THROW(newton_stationary(HomogeneousState::scalar_preset(7, 0.0, 1.0), {OdeVar::s}), SingularJacobianError);
}

TEST(Newton, NoConvergence) {
  HomogeneousState g = HomogeneousState::psi_preset(1.0, 1.0 / 3.0, -1.0 / 6.0);
  g.s = 2.0;
  NewtonOptions opt;
  opt.max_iter = 1;
  EXPECT_THROW(newton_stationary(g, {OdeVar::s, OdeVar::f}, opt), ConvergenceError);
}

TEST(Newton, RejectsInactiveVariable) {
  EXPECT_THROW(newton_stationary(HomogeneousState::psi_preset(1.0), {OdeVar::b}), ConfigError);
}

TEST(IntegrateOde, NegativeLambdaClosedForm) {
  const double f0 = 0.2;
  OdeOptions opt;
  opt.dt = 1e-3;
  const OdeTrajectory tr = integrate_ode(HomogeneousState::scalar_preset(7, f0, -1.0), opt);
  EXPECT_EQ(tr.cause, Termination::t_end_reached);
  EXPECT_DOUBLE_EQ(tr.t, 1.0);
  EXPECT_NEAR(tr.final_state.f, std::log(std::exp(f0) + 2.0), 1e-8);
  EXPECT_EQ(tr.samples.size(), 1001u);
}

TEST(IntegrateOde, PositiveLambdaEscape) {
  const double f0 = 0.1;
  OdeOptions opt;
  opt.dt = 1e-3;
  const OdeTrajectory tr = integrate_ode(HomogeneousState::scalar_preset(7, f0, 1.0), opt);
  EXPECT_EQ(tr.cause, Termination::blow_up);
  EXPECT_EQ(tr.quantity, "f");
  EXPECT_NEAR(tr.t, std::exp(f0) / 2.0, 0.01 * std::exp(f0) / 2.0);
}

TEST(IntegrateOde, StationaryPointIsConstant) {
  OdeOptions opt;
  opt.dt = 1e-2;
  const HomogeneousState fr = HomogeneousState::psi_preset(1.0, 1.0 / 3.0, -1.0 / 6.0);
  const OdeTrajectory tr = integrate_ode(fr, opt);
  EXPECT_LE(std::abs(tr.final_state.s - 1.0), 1e-12);
  EXPECT_LE(std::abs(tr.final_state.f), 1e-12);
  EXPECT_EQ(tr.final_state.c, 1.0);
}

TEST(IntegrateOde, CadenceRecords) {
  OdeOptions opt;
  opt.dt = 0.01;
  opt.t_end = 0.37;
  opt.cadence = 5;
  const OdeTrajectory tr = integrate_ode(HomogeneousState::scalar_preset(6, 0.0, -1.0), opt);
  EXPECT_EQ(tr.steps, 37);
  EXPECT_EQ(tr.samples.size(), 9u);
}

TEST(IntegrateOde, AgreesWithGridFlow) {
  for (OdePreset preset : {OdePreset::psi, OdePreset::beta}) {
    HomogeneousState h = preset == OdePreset::psi ? HomogeneousState::psi_preset(0.8, 0.0, -0.3)
                                                  : HomogeneousState::beta_preset(0.6, 0.0, 0.2, -1);
    h.s = 1.1;
    h.f = 0.1;
    OdeOptions opt;
    opt.dt = 0.01;
    const OdeTrajectory tr = integrate_ode(h, opt);
    FlowConfig cfg;
    cfg.dt = opt.dt;
    cfg.gauge = Gauge::none;
    const RunResult<ReducedState> run = run_flow(to_reduced_state(h), cfg);
    ASSERT_EQ(run.cause, Termination::t_end_reached);
    ASSERT_EQ(tr.cause, Termination::t_end_reached);
    EXPECT_NEAR(run.final_state.ghat.tensor().component(0, 0)[0], tr.final_state.s, 1e-10);
    EXPECT_NEAR(run.final_state.f[0], tr.final_state.f, 1e-10);
  }
}

}  // namespace
}  // namespace sgflow
