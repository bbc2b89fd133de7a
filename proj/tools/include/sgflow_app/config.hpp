#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgflow/flow.hpp"
#include "sgflow/io.hpp"
#include "sgflow/ode.hpp"

namespace sgflow::app {

enum class Mode { euclidean, reduced, ode, verify };
std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

/// amplitude * cos(2π Σ_a wave_a x_a / L_a + phase)
struct TrigTerm {
  double amplitude = 0.0;
  std::vector<int> wave;
  double phase = 0.0;
  bool operator==(const TrigTerm&) const = default;
};
using TrigPoly = std::vector<TrigTerm>;

/// Form = components + constant + d(potential). Keys list strictly increasing
/// axis indices, e.g. "0,2,3"; the potential has one degree less.
struct FormSpec {
  std::map<std::string, double> constant;
  std::map<std::string, TrigPoly> components;
  std::map<std::string, TrigPoly> potential;
  bool empty() const { return constant.empty() && components.empty() && potential.empty(); }
  bool operator==(const FormSpec&) const = default;
};

struct InitialData {
  /// "fields" (trigonometric polynomials below), "vacuum" or "smooth" (seeded
  /// random low-mode data with closed forms).
  std::string preset = "fields";
  double amplitude = 0.1;
  std::uint64_t seed = 1;
  bool psi_only = false;
  double metric_scale = 1.0;
  /// Added to metric_scale * identity; keys "i,j" with i <= j.
  std::map<std::string, TrigPoly> metric;
  TrigPoly f;
  FormSpec beta, psi, F;
  int F_degree = 2;
  bool operator==(const InitialData&) const = default;
};

struct GridConfig {
  std::vector<int> shape;
  std::vector<double> lengths;
  bool operator==(const GridConfig&) const = default;
};

struct DiagnosticsSwitches {
  bool curvature = true;
  bool field_equations = true;
  bool alpha = true;
  bool shi = true;
  bool action = true;
  bool operator==(const DiagnosticsSwitches&) const = default;
};

struct OdeConfig {
  OdePreset preset = OdePreset::scalar;
  double s = 1.0, f = 0.0, b = 0.0, c = 0.0;
  /// "integrate" or "newton"
  std::string task = "integrate";
  double dt = 1e-3;
  std::vector<std::string> free{"kappa", "lambda"};
  double tol = 1e-12;
  int max_iter = 100;
  bool operator==(const OdeConfig&) const = default;
};

struct VerifyConfig {
  std::uint64_t seed = 1;
  /// Full-size closedness and Shi runs instead of the shortened ones.
  bool full = false;
  bool operator==(const VerifyConfig&) const = default;
};

struct OutputConfig {
  std::string dir = "sgflow_out";
  bool timing = true;
  /// Write a checkpoint every this many steps (0: final state only).
  long checkpoint_every = 0;
  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  Mode mode = Mode::reduced;
  int p = 7;
  int sigma = 1;
  double lambda = 0.0;
  double kappa = 0.0;
  std::optional<GridConfig> grid;
  InitialData initial;
  FlowConfig flow;
  DiagnosticsSwitches diagnostics;
  OdeConfig ode;
  VerifyConfig verify;
  OutputConfig output;
  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates a JSON document. Unknown keys, wrong types and
/// semantic problems raise ConfigError carrying a JSON pointer.
RunConfig parse_config(const std::string& text);
RunConfig config_from_json(const ojson& j);
/// Complete document with every default written out.
ojson to_json(const RunConfig& c);
void validate(const RunConfig& c);

/// Multiplies resolved axes by k and divides a fixed dt by k².
void apply_refinement(RunConfig& c, int k);

}  // namespace sgflow::app
