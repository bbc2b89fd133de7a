#include "sgflow_app/initial.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "sgflow/error.hpp"
#include "sgflow/forms.hpp"

namespace sgflow::app {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Mask mask_of(const std::string& key) {
  Mask m = 0;
  std::stringstream ss(key);
  std::string tok;
  while (std::getline(ss, tok, ',')) m |= Mask{1} << std::stoi(tok);
  return m;
}

TrigPoly random_poly(const GridSpec& grid, double amplitude, std::mt19937_64& rng, int max_mode) {
  std::uniform_real_distribution<double> ph(0.0, kTwoPi);
  std::uniform_real_distribution<double> amp(-amplitude, amplitude);
  std::uniform_int_distribution<int> mode(1, max_mode);
  TrigPoly p;
  for (int a = 0; a < grid.dim(); ++a) {
    if (!grid.resolved(a)) continue;
    TrigTerm t;
    t.wave.assign(grid.dim(), 0);
    t.wave[a] = mode(rng);
    t.amplitude = amp(rng);
    t.phase = ph(rng);
    p.push_back(t);
  }
  return p;
}

}  // namespace

ScalarField evaluate(const GridSpec& grid, const TrigPoly& poly) {
  ScalarField s(grid);
  for (std::size_t q = 0; q < grid.size(); ++q) {
    double v = 0.0;
    for (const TrigTerm& t : poly) {
      double arg = t.phase;
      for (int a = 0; a < grid.dim(); ++a) arg += kTwoPi * t.wave[a] * grid.coordinate(q, a) / grid.length(a);
      v += t.amplitude * std::cos(arg);
    }
    s[q] = v;
  }
  return s;
}

DifferentialForm build_form(const GridSpec& grid, int degree, const FormSpec& spec) {
  DifferentialForm out(grid, degree);
  if (out.empty()) return out;
  for (const auto& [k, v] : spec.constant) {
    double* c = out.component(mask_of(k));
    for (std::size_t q = 0; q < grid.size(); ++q) c[q] += v;
  }
  for (const auto& [k, poly] : spec.components) {
    const ScalarField s = evaluate(grid, poly);
    double* c = out.component(mask_of(k));
    for (std::size_t q = 0; q < grid.size(); ++q) c[q] += s[q];
  }
  if (!spec.potential.empty()) {
    DifferentialForm pot(grid, degree - 1);
    for (const auto& [k, poly] : spec.potential) {
      const ScalarField s = evaluate(grid, poly);
      double* c = pot.component(mask_of(k));
      for (std::size_t q = 0; q < grid.size(); ++q) c[q] += s[q];
    }
    out += exterior_derivative(pot);
  }
  return out;
}

MetricField smooth_metric(const GridSpec& grid, double amplitude, std::uint64_t seed, int max_mode) {
  std::mt19937_64 rng(seed);
  SymTensorField t = SymTensorField::identity(grid);
  const int n = grid.dim();
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const ScalarField s = evaluate(grid, random_poly(grid, (i == j ? 1.0 : 0.5) * amplitude / std::max(1, n), rng, max_mode));
      double* c = t.component(i, j);
      for (std::size_t q = 0; q < grid.size(); ++q) c[q] += s[q];
    }
  }
  return MetricField(std::move(t));
}

ScalarField smooth_scalar(const GridSpec& grid, double amplitude, std::uint64_t seed, int max_mode) {
  std::mt19937_64 rng(seed);
  return evaluate(grid, random_poly(grid, amplitude, rng, max_mode));
}

DifferentialForm smooth_form(const GridSpec& grid, int degree, double amplitude, std::uint64_t seed, int max_mode) {
  DifferentialForm f(grid, degree);
  std::mt19937_64 rng(seed);
  for (int c = 0; c < f.channels(); ++c) {
    const ScalarField s = evaluate(grid, random_poly(grid, amplitude, rng, max_mode));
    std::copy(s.raw().begin(), s.raw().end(), f.channel(c));
  }
  return f;
}

DifferentialForm smooth_closed_form(const GridSpec& grid, int degree, double amplitude, std::uint64_t seed,
                                    int max_mode) {
  DifferentialForm f(grid, degree);
  if (f.empty()) return f;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  for (int c = 0; c < f.channels(); ++c) {
    const double v = u(rng);
    std::fill(f.channel(c), f.channel(c) + grid.size(), v);
  }
  if (degree >= 1) f += exterior_derivative(smooth_form(grid, degree - 1, amplitude, seed + 1, max_mode));
  return f;
}

GridSpec make_grid(const RunConfig& c) {
  if (!c.grid) throw ConfigError("/grid", "required");
  return GridSpec(c.grid->shape, c.grid->lengths);
}

namespace {

MetricField build_metric(const GridSpec& grid, const InitialData& d) {
  if (d.preset == "smooth") return smooth_metric(grid, d.amplitude, d.seed);
  SymTensorField t = SymTensorField::identity(grid, d.metric_scale);
  if (d.preset == "fields") {
    for (const auto& [k, poly] : d.metric) {
      const Mask m = mask_of(k);
      int idx[2] = {-1, -1}, c = 0;
      for (int a = 0; a < grid.dim(); ++a) {
        if (m & (Mask{1} << a)) idx[c++] = a;
      }
      if (c == 1) idx[1] = idx[0];
      const ScalarField s = evaluate(grid, poly);
      double* dst = t.component(idx[0], idx[1]);
      for (std::size_t q = 0; q < grid.size(); ++q) dst[q] += s[q];
    }
  }
  try {
    return MetricField(std::move(t));
  } catch (const DegenerateMetricError& e) {
    throw ConfigError("/initial/metric", std::string("initial metric is not positive definite: ") + e.what());
  }
}

}  // namespace

ReducedState build_reduced_state(const RunConfig& c) {
  const GridSpec grid = make_grid(c);
  const InitialData& d = c.initial;
  ReducedState s = ReducedState::vacuum(grid, EinsteinFactor{c.p + 1, c.sigma, c.lambda});
  s.ghat = build_metric(grid, d);
  if (d.preset == "smooth") {
    s.f = smooth_scalar(grid, d.amplitude, d.seed + 1);
    if (!d.psi_only) s.beta = smooth_closed_form(grid, 3 - c.p, d.amplitude, d.seed + 2);
    s.psi = smooth_closed_form(grid, 4, d.amplitude, d.seed + 3);
  } else if (d.preset == "fields") {
    s.f = evaluate(grid, d.f);
    s.beta = build_form(grid, 3 - c.p, d.beta);
    s.psi = build_form(grid, 4, d.psi);
  }
  s.validate();
  return s;
}

EuclideanState build_euclidean_state(const RunConfig& c) {
  const GridSpec grid = make_grid(c);
  const InitialData& d = c.initial;
  EuclideanState s{build_metric(grid, d), DifferentialForm(grid, d.F_degree), c.sigma, 0.0};
  if (d.preset == "smooth") s.F = smooth_closed_form(grid, d.F_degree, d.amplitude, d.seed + 2);
  else if (d.preset == "fields") s.F = build_form(grid, d.F_degree, d.F);
  return s;
}

HomogeneousState build_homogeneous_state(const RunConfig& c) {
  HomogeneousState h;
  h.preset = c.ode.preset;
  h.p = c.p;
  h.s = c.ode.s;
  h.f = c.ode.f;
  h.b = c.ode.b;
  h.c = c.ode.c;
  h.kappa = c.kappa;
  h.lambda = c.lambda;
  h.sigma = c.sigma;
  h.validate();
  return h;
}

}  // namespace sgflow::app
