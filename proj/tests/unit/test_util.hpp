#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>
#include <algorithm>

#include "sgflow/fields.hpp"
#include "sgflow/flow.hpp"
#include "sgflow/forms.hpp"

namespace sgflow::fixtures {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline DifferentialForm random_form(const GridSpec& grid, int degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DifferentialForm f(grid, degree);
  for (double& v : f.raw()) v = u(rng);
  return f;
}

inline ScalarField random_scalar(const GridSpec& grid, std::mt19937_64& rng, double amplitude = 1.0) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  ScalarField s(grid);
  for (double& v : s.raw()) v = u(rng);
  return s;
}

template <class Fn>
ScalarField sample(const GridSpec& grid, Fn&& fn) {
  ScalarField s(grid);
  double x[kMaxDim] = {};
  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (int a = 0; a < grid.dim(); ++a) x[a] = grid.coordinate(p, a);
    s[p] = fn(x);
  }
  return s;
}

/// Smooth positive-definite perturbation of the identity built from low
/// Fourier modes along the resolved axes.
inline MetricField smooth_metric(const GridSpec& grid, double amplitude = 0.1, int seed = 1) {
  SymTensorField t = SymTensorField::identity(grid);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ph(0.0, kTwoPi);
  const int n = grid.dim();
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double phase = ph(rng);
      const int a = (i + j) % n;
      const double scale = (i == j) ? amplitude : 0.5 * amplitude;
      ScalarField s = sample(grid, [&](const double* x) {
        double acc = 0.0;
        for (int b = 0; b < n; ++b) {
          if (grid.resolved(b)) acc += std::sin(kTwoPi * x[b] / grid.length(b) + phase + (b == a ? 0.7 : 0.0));
        }
        return scale * acc / n;
      });
      double* c = t.component(i, j);
      for (std::size_t p = 0; p < grid.size(); ++p) c[p] += s[p];
    }
  }
  return MetricField(std::move(t));
}

/// Smooth field sum of low Fourier modes along the resolved axes.
inline ScalarField smooth_scalar(const GridSpec& grid, double amplitude, int seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ph(0.0, kTwoPi);
  std::uniform_int_distribution<int> mode(1, 2);
  const int n = grid.dim();
  std::vector<double> phase(n), wave(n);
  for (int b = 0; b < n; ++b) {
    phase[b] = ph(rng);
    wave[b] = mode(rng);
  }
  return sample(grid, [&](const double* x) {
    double acc = 0.0;
    for (int b = 0; b < n; ++b) {
      if (grid.resolved(b)) acc += std::sin(kTwoPi * wave[b] * x[b] / grid.length(b) + phase[b]);
    }
    return n > 0 ? amplitude * acc / n : 0.0;
  });
}

inline DifferentialForm smooth_form(const GridSpec& grid, int degree, double amplitude, int seed) {
  DifferentialForm f(grid, degree);
  for (int c = 0; c < f.channels(); ++c) {
    const ScalarField s = smooth_scalar(grid, amplitude, seed * 7919 + c);
    std::copy(s.raw().begin(), s.raw().end(), f.channel(c));
  }
  return f;
}

/// Constant part plus d of a smooth potential: closed to roundoff.
inline DifferentialForm closed_form(const GridSpec& grid, int degree, double amplitude, int seed) {
  DifferentialForm f(grid, degree);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  for (int c = 0; c < f.channels(); ++c) {
    const double v = u(rng);
    std::fill(f.channel(c), f.channel(c) + grid.size(), v);
  }
  if (degree >= 1) f += exterior_derivative(smooth_form(grid, degree - 1, amplitude, seed + 1));
  return f;
}

inline EinsteinFactor factor_for(int p, int sigma = 1, double lambda = 0.0) { return EinsteinFactor{p + 1, sigma, lambda}; }

/// Grid for a reduced state: n = 10 - p axes, the first `resolved` of them
/// carrying `points` points and the rest homogeneous.
inline GridSpec reduced_grid(int p, int resolved, int points) {
  const int n = 10 - p;
  std::vector<int> shape(n, 1);
  std::vector<double> len(n, 1.0);
  for (int a = 0; a < std::min(resolved, n); ++a) shape[a] = points;
  return GridSpec(shape, len);
}

inline ReducedState smooth_reduced(int p, int resolved, int points, int sigma, double lambda, int seed) {
  const GridSpec grid = reduced_grid(p, resolved, points);
  ReducedState s = ReducedState::vacuum(grid, factor_for(p, sigma, lambda));
  s.ghat = smooth_metric(grid, 0.15, seed);
  s.f = smooth_scalar(grid, 0.3, seed + 1);
  s.beta = closed_form(grid, 3 - p, 0.3, seed + 2);
  s.psi = closed_form(grid, 4, 0.3, seed + 3);
  return s;
}


}  // namespace sgflow::fixtures
