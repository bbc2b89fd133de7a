#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sgflow/error.hpp"
#include "sgflow/forms.hpp"
#include "sgflow_app/config.hpp"
#include "sgflow_app/initial.hpp"

namespace sgflow::app {
namespace {

std::string error_path(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<accepted>";
}

TEST(Config, MinimalVacuumResolvesDefaults) {
  const RunConfig c = parse_config(R"({"mode": "reduced", "grid": {"shape": [8, 8, 8]}, "initial": {"preset": "vacuum"}})");
  EXPECT_EQ(c.mode, Mode::reduced);
  EXPECT_EQ(c.p, 7);
  EXPECT_EQ(c.sigma, 1);
  EXPECT_EQ(c.lambda, 0.0);
  EXPECT_EQ(c.flow.scheme, Scheme::rk4);
  EXPECT_EQ(c.grid->lengths, (std::vector<double>{1.0, 1.0, 1.0}));
}

TEST(Config, PsiOnlyNeedsSmallBase) {
  const std::string text =
      R"({"mode": "reduced", "p": 2, "grid": {"shape": [8, 8, 1, 1, 1, 1, 1, 1]},
          "initial": {"preset": "smooth", "psi_only": true}})";
  EXPECT_EQ(error_path(text), "/initial/psi_only");
  EXPECT_NO_THROW(parse_config(
      R"({"mode": "reduced", "p": 3, "grid": {"shape": [8, 8, 1, 1, 1, 1, 1]}, "initial": {"preset": "smooth", "psi_only": true}})"));
}

TEST(Config, SchemaErrorsCarryPaths) {
  EXPECT_EQ(error_path(R"({"p": 7})"), "/mode");
  EXPECT_EQ(error_path(R"({"mode": "reduced", "grid": {"shape": [8, 8, 8]}, "bogus": 1})"), "/bogus");
  EXPECT_EQ(error_path(R"({"mode": "reduced", "grid": {"shape": [8, 8.5, 8]}})"), "/grid/shape/1");
  EXPECT_EQ(error_path(R"({"mode": "reduced", "grid": {"shape": [8, 8, 8]},
                           "initial": {"f": [{"amplitude": 1, "wave": [1, 0.5, 0]}]}})"),
            "/initial/f/0/wave/1");
  EXPECT_EQ(error_path(R"({"mode": "reduced", "grid": {"shape": [8, 8]}})"), "/grid/shape");
  EXPECT_EQ(error_path(R"({"mode": "reduced"})"), "/grid");
  EXPECT_EQ(error_path(R"({"mode": "reduced", "kappa": 0.5, "grid": {"shape": [8, 8, 8]}})"), "/kappa");
}

TEST(Config, RoundTrip) {
  const RunConfig c = parse_config(R"({
    "mode": "reduced", "p": 6, "sigma": -1, "lambda": -0.25,
    "grid": {"shape": [8, 8, 1, 1], "lengths": [1.0, 2.0, 1.0, 1.0]},
    "initial": {"preset": "fields", "metric_scale": 1.5,
                "metric": {"0,1": [{"amplitude": 0.05, "wave": [1, 1, 0, 0], "phase": 0.3}]},
                "f": [{"amplitude": 0.1, "wave": [0, 2, 0, 0]}],
                "psi": {"constant": {"0,1,2,3": 0.5}, "potential": {"1,2,3": [{"amplitude": 0.1, "wave": [1, 0, 0, 0]}]}}},
    "flow": {"dt": 1e-4, "t_end": 0.01, "gauge": "f_gauged", "cadence": 5},
    "output": {"dir": "out", "timing": false, "checkpoint_every": 10}})");
  EXPECT_EQ(config_from_json(to_json(c)), c);
  EXPECT_EQ(parse_config(to_json(c).dump()), c);
}

TEST(Config, Refinement) {
  RunConfig c = parse_config(R"({"mode": "reduced", "grid": {"shape": [8, 1, 8]}, "flow": {"dt": 0.01}})");
  apply_refinement(c, 2);
  EXPECT_EQ(c.grid->shape, (std::vector<int>{16, 1, 16}));
  EXPECT_DOUBLE_EQ(c.flow.dt, 0.0025);
}

TEST(Initial, TrigPolynomialIsExact) {
  const GridSpec grid({8, 4}, {2.0, 1.0});
  const ScalarField u = evaluate(grid, {TrigTerm{0.5, {1, 2}, 0.25}});
  for (std::size_t q = 0; q < grid.size(); ++q) {
    const double x = grid.coordinate(q, 0), y = grid.coordinate(q, 1);
    EXPECT_NEAR(u[q], 0.5 * std::cos(2.0 * std::numbers::pi * (x / 2.0 + 2.0 * y) + 0.25), 1e-15);
  }
}

TEST(Initial, PotentialFormsAreClosed) {
  const RunConfig c = parse_config(R"({
    "mode": "reduced", "p": 2, "grid": {"shape": [8, 8, 1, 1, 1, 1, 1, 1]},
    "initial": {"preset": "fields",
                "beta": {"constant": {"3": 0.2}, "potential": {"": [{"amplitude": 0.3, "wave": [1, 2, 0, 0, 0, 0, 0, 0]}]}},
                "psi": {"potential": {"0,2,3": [{"amplitude": 0.1, "wave": [1, 1, 0, 0, 0, 0, 0, 0]}],
                                      "1,4,5": [{"amplitude": 0.2, "wave": [2, 0, 0, 0, 0, 0, 0, 0]}]}}}})");
  const ReducedState s = build_reduced_state(c);
  EXPECT_GT(s.beta.sup_norm(), 0.1);
  EXPECT_GT(s.psi.sup_norm(), 0.1);
  EXPECT_LT(exterior_derivative(s.beta).sup_norm(), 1e-13);
  EXPECT_LT(exterior_derivative(s.psi).sup_norm(), 1e-13);
}

TEST(Initial, SmoothPresetIsSeeded) {
  const char* text = R"({"mode": "euclidean", "grid": {"shape": [6, 6, 6]}, "initial": {"preset": "smooth", "seed": 4}})";
  const EuclideanState a = build_euclidean_state(parse_config(text));
  const EuclideanState b = build_euclidean_state(parse_config(text));
  EXPECT_EQ(a.g.tensor().raw(), b.g.tensor().raw());
  EXPECT_EQ(a.F.raw(), b.F.raw());
  EXPECT_LT(exterior_derivative(a.F).sup_norm(), 1e-13);
}

}  // namespace
}  // namespace sgflow::app
