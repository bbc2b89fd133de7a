#pragma once

#include "sgflow_app/config.hpp"

namespace sgflow::app {

ScalarField evaluate(const GridSpec& grid, const TrigPoly& p);
DifferentialForm build_form(const GridSpec& grid, int degree, const FormSpec& spec);

/// Seeded low-mode data: metric I + O(amplitude), closed forms.
/// Wave numbers are drawn from 1..max_mode along each resolved axis.
MetricField smooth_metric(const GridSpec& grid, double amplitude, std::uint64_t seed, int max_mode = 2);
ScalarField smooth_scalar(const GridSpec& grid, double amplitude, std::uint64_t seed, int max_mode = 2);
DifferentialForm smooth_closed_form(const GridSpec& grid, int degree, double amplitude, std::uint64_t seed,
                                    int max_mode = 2);
DifferentialForm smooth_form(const GridSpec& grid, int degree, double amplitude, std::uint64_t seed, int max_mode = 2);

GridSpec make_grid(const RunConfig& c);
ReducedState build_reduced_state(const RunConfig& c);
EuclideanState build_euclidean_state(const RunConfig& c);
HomogeneousState build_homogeneous_state(const RunConfig& c);

}  // namespace sgflow::app
