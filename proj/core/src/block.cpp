#include "sgflow/block.hpp"

#include <algorithm>
#include <cmath>

#include "sgflow/error.hpp"
#include "sgflow/forms.hpp"

namespace sgflow {

BlockForm::BlockForm(const GridSpec& grid, int pdim_, int degree_)
    : pdim(pdim_), degree(degree_), base(grid, degree_), fiber(grid, degree_ - pdim_) {}

BlockForm::BlockForm(int pdim_, DifferentialForm base_, DifferentialForm fiber_)
    : pdim(pdim_), degree(base_.degree()), base(std::move(base_)), fiber(std::move(fiber_)) {
  if (fiber.degree() != degree - pdim) throw ShapeError("BlockForm: inconsistent block degrees");
}

BlockForm& BlockForm::operator+=(const BlockForm& o) {
  base += o.base;
  fiber += o.fiber;
  return *this;
}

BlockForm& BlockForm::operator-=(const BlockForm& o) {
  base -= o.base;
  fiber -= o.fiber;
  return *this;
}

BlockForm& BlockForm::operator*=(double a) {
  base *= a;
  fiber *= a;
  return *this;
}

BlockForm operator+(BlockForm a, const BlockForm& b) { return a += b; }
BlockForm operator-(BlockForm a, const BlockForm& b) { return a -= b; }

namespace {

ScalarField exp_of(const ScalarField& f, double c) {
  ScalarField out(f.grid());
  for (std::size_t p = 0; p < f.points(); ++p) out[p] = std::exp(c * f[p]);
  return out;
}

}  // namespace

BlockForm block_d(const BlockForm& a) {
  DifferentialForm fib = exterior_derivative(a.fiber);
  if (a.pdim % 2 == 1) fib *= -1.0;
  return BlockForm(a.pdim, exterior_derivative(a.base), std::move(fib));
}

BlockForm block_star(const WarpedMetric& g, const BlockForm& a) {
  const int n = g.ghat.dim();
  const double c = 0.5 * g.pdim;
  // ⋆ω lands in the fiber block, ⋆(dvol∧η) in the base block.
  DifferentialForm fib = scale_form(exp_of(g.f, c), hodge_star(g.ghat, a.base));
  if ((a.degree * g.pdim) % 2 != 0) fib *= -1.0;
  DifferentialForm bas = scale_form(exp_of(g.f, -c), hodge_star(g.ghat, a.fiber));
  bas *= -g.sigma;
  BlockForm out(g.pdim, std::move(bas), std::move(fib));
  if (out.degree != g.pdim + n - a.degree) {
    // Both parts empty: keep the bookkeeping consistent.
    return BlockForm(g.ghat.grid(), g.pdim, g.pdim + n - a.degree);
  }
  return out;
}

BlockForm block_wedge(const BlockForm& a, const BlockForm& b) {
  DifferentialForm base = wedge(a.base, b.base);
  DifferentialForm fib = wedge(a.base, b.fiber);
  if ((a.degree * a.pdim) % 2 != 0) fib *= -1.0;
  fib += wedge(a.fiber, b.base);
  BlockForm out(a.pdim, std::move(base), std::move(fib));
  return out;
}

BlockForm block_codifferential(const WarpedMetric& g, const BlockForm& a) {
  const int D = g.pdim + g.ghat.dim();
  const int K = a.degree;
  if (K <= 0) return BlockForm(g.ghat.grid(), g.pdim, K - 1);
  BlockForm out = block_star(g, block_d(block_star(g, a)));
  const int sign = g.sigma * (((D * (K + 1)) % 2) ? -1 : 1);
  if (sign < 0) out *= -1.0;
  return out;
}

BlockForm block_laplacian(const WarpedMetric& g, const BlockForm& a) {
  BlockForm out = block_d(block_codifferential(g, a));
  out += block_codifferential(g, block_d(a));
  return out;
}

ScalarField block_norm_squared(const WarpedMetric& g, const BlockForm& a) {
  ScalarField out = a.base.empty() ? ScalarField(g.ghat.grid()) : norm_squared(g.ghat, a.base);
  if (!a.fiber.empty()) {
    const ScalarField nf = norm_squared(g.ghat, a.fiber);
    for (std::size_t p = 0; p < out.points(); ++p) out[p] -= g.sigma * std::exp(-g.pdim * g.f[p]) * nf[p];
  }
  return out;
}

double block_sup_norm(const WarpedMetric& g, const BlockForm& a) {
  double m = 0.0;
  if (!a.base.empty()) m = std::max(m, sup_pointwise_norm(g.ghat, a.base));
  if (!a.fiber.empty()) {
    const ScalarField nf = norm_squared(g.ghat, a.fiber);
    for (std::size_t p = 0; p < nf.points(); ++p) m = std::max(m, std::sqrt(std::max(0.0, std::exp(-g.pdim * g.f[p]) * nf[p])));
  }
  return m;
}

}  // namespace sgflow
