#pragma once

#include "sgflow/fields.hpp"

namespace sgflow {

/// Form on a warped product N^{p+1} x M written as ω + dvol_g̃ ∧ η with ω, η
/// forms on the base M. The total degree K fixes deg ω = K and
/// deg η = K - (p+1); either part may be an empty zero form.
struct BlockForm {
  int pdim = 1;
  int degree = 0;
  DifferentialForm base;
  DifferentialForm fiber;

  BlockForm() = default;
  BlockForm(const GridSpec& grid, int pdim, int degree);
  BlockForm(int pdim, DifferentialForm base, DifferentialForm fiber);

  double sup_norm() const { return std::max(base.sup_norm(), fiber.sup_norm()); }
  BlockForm& operator+=(const BlockForm& o);
  BlockForm& operator-=(const BlockForm& o);
  BlockForm& operator*=(double a);
};

BlockForm operator+(BlockForm a, const BlockForm& b);
BlockForm operator-(BlockForm a, const BlockForm& b);

/// Warped-product metric data: g = e^f g̃ + ĝ with g̃ of dimension pdim,
/// Lorentzian when sigma = +1.
struct WarpedMetric {
  const MetricField& ghat;
  const ScalarField& f;
  int pdim;
  int sigma;
};

/// d(ω + dvol∧η) = dω + (-1)^{p+1} dvol∧dη
BlockForm block_d(const BlockForm& a);
/// ⋆_g ω = (-1)^{k(p+1)} e^{(p+1)f/2} dvol∧⋆_ĝ ω;  ⋆_g(dvol∧η) = -σ e^{-(p+1)f/2} ⋆_ĝ η
BlockForm block_star(const WarpedMetric& g, const BlockForm& a);
BlockForm block_wedge(const BlockForm& a, const BlockForm& b);
/// d† = σ(-1)^{D(K+1)} ⋆d⋆ on K-forms in total dimension D.
BlockForm block_codifferential(const WarpedMetric& g, const BlockForm& a);
BlockForm block_laplacian(const WarpedMetric& g, const BlockForm& a);
/// Pointwise |ω|² - σ e^{-(p+1)f}|η|².
ScalarField block_norm_squared(const WarpedMetric& g, const BlockForm& a);
/// Sup over points of max(|ω|_ĝ, e^{-(p+1)f/2}|η|_ĝ).
double block_sup_norm(const WarpedMetric& g, const BlockForm& a);

}  // namespace sgflow
