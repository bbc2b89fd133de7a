#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "sgflow/flow.hpp"
#include "sgflow/forms.hpp"
#include "sgflow/geometry.hpp"

namespace {

using namespace sgflow;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

GridSpec base_grid(int n, int resolved, int points) {
  std::vector<int> shape(n, 1);
  for (int a = 0; a < std::min(n, resolved); ++a) shape[a] = points;
  return GridSpec(shape, std::vector<double>(n, 1.0));
}

ScalarField wave(const GridSpec& grid, double amp, int shift) {
  ScalarField s(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    double acc = 0.0;
    for (int a = 0; a < grid.dim(); ++a) acc += std::sin(kTwoPi * grid.coordinate(p, a) + 0.3 * (a + shift));
    s[p] = amp * acc;
  }
  return s;
}

MetricField wavy_metric(const GridSpec& grid) {
  SymTensorField t = SymTensorField::identity(grid);
  for (int i = 0; i < grid.dim(); ++i) {
    const ScalarField w = wave(grid, 0.05, i);
    for (std::size_t p = 0; p < grid.size(); ++p) t.component(i, i)[p] += w[p];
  }
  return MetricField(std::move(t));
}

ReducedState reduced_state(int p, int points) {
  const int n = 10 - p;
  const GridSpec grid = base_grid(n, std::min(n, 4), points);
  ReducedState s = ReducedState::vacuum(grid, EinsteinFactor{p + 1, 1, -1.0});
  s.ghat = wavy_metric(grid);
  s.f = wave(grid, 0.2, 5);
  if (!s.psi.empty()) s.psi.fill(1.0);
  if (!s.beta.empty()) s.beta.fill(0.5);
  return s;
}

void BM_RhsReduced(benchmark::State& st) {
  const ReducedState s = reduced_state(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const ChristoffelField gamma0 = christoffels(s.ghat);
  for (auto _ : st) benchmark::DoNotOptimize(rhs_reduced(s, Gauge::deturck, &s.ghat, &gamma0));
  st.counters["points"] = static_cast<double>(s.ghat.points());
}
BENCHMARK(BM_RhsReduced)->Args({7, 16})->Args({6, 12})->Args({3, 8})->Unit(benchmark::kMillisecond);

void BM_CurvatureSuite(benchmark::State& st) {
  const GridSpec grid = GridSpec::cube(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const MetricField g = wavy_metric(grid);
  for (auto _ : st) benchmark::DoNotOptimize(curvature_suite(g));
}
BENCHMARK(BM_CurvatureSuite)->Args({3, 16})->Args({4, 12})->Unit(benchmark::kMillisecond);

void BM_HodgeLaplacian(benchmark::State& st) {
  const GridSpec grid = GridSpec::cube(4, static_cast<int>(st.range(0)));
  const MetricField g = wavy_metric(grid);
  DifferentialForm a(grid, static_cast<int>(st.range(1)));
  for (int c = 0; c < a.channels(); ++c) {
    const ScalarField w = wave(grid, 1.0, c);
    std::copy(w.raw().begin(), w.raw().end(), a.channel(c));
  }
  for (auto _ : st) benchmark::DoNotOptimize(hodge_laplacian(g, a));
}
BENCHMARK(BM_HodgeLaplacian)->Args({12, 2})->Args({12, 4})->Unit(benchmark::kMillisecond);

void BM_MetricConstruction(benchmark::State& st) {
  const GridSpec grid = GridSpec::cube(4, static_cast<int>(st.range(0)));
  const SymTensorField t = wavy_metric(grid).tensor();
  for (auto _ : st) benchmark::DoNotOptimize(MetricField(t));
}
BENCHMARK(BM_MetricConstruction)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace
void BM_FlowStep(benchmark::State& st) {
  const ReducedState s = reduced_state(6, 12);
  FlowConfig cfg;
  const auto rhs = make_rhs(s, cfg);
  const double dt = 0.5 * cfl_limit(s.ghat, cfg.c_cfl);
  for (auto _ : st) benchmark::DoNotOptimize(step(s, dt, Scheme::rk4, rhs));
}
BENCHMARK(BM_FlowStep)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
