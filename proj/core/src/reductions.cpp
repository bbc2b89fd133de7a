#include "sgflow/reductions.hpp"

#include <algorithm>
#include <cmath>

#include "sgflow/error.hpp"
#include "sgflow/forms.hpp"

namespace sgflow {
namespace {

double diff_sup(const GridData& a, const GridData& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.raw().size(); ++i) m = std::max(m, std::abs(a.raw()[i] - b.raw()[i]));
  return m;
}

double max_diff(const ReducedRhs& a, const ReducedRhs& b) {
  return std::max({diff_sup(a.dghat, b.dghat), diff_sup(a.df, b.df), diff_sup(a.dbeta, b.dbeta),
                   diff_sup(a.dpsi, b.dpsi)});
}

bool is_zero(const GridData& a) {
  return std::all_of(a.raw().begin(), a.raw().end(), [](double v) { return v == 0.0; });
}

DifferentialForm star_d_star(const MetricField& g, const DifferentialForm& a) {
  return hodge_star(g, exterior_derivative(hodge_star(g, a)));
}

/// -2Ric + (p+1)(∇²f + ½ df⊗df) and the f-equation terms shared by both
/// specializations, written out independently of rhs_reduced.
struct Common {
  SymTensorField dg;
  ScalarField df;
  DifferentialForm dfform;
};

Common common_terms(const ReducedState& s) {
  const MetricField& g = s.ghat;
  const int n = g.dim();
  const int pd = s.factor.pdim;
  const ChristoffelField gamma = christoffels(g);
  const Hessian H = hessian_and_laplacian(g, gamma, s.f);
  Common c{ricci(g, gamma), ScalarField(g.grid()), exterior_derivative(as_form(s.f))};
  c.dg *= -2.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double* o = c.dg.component(i, j);
      const double* h = H.hess.component(i, j);
      const double* fi = H.df.component(i);
      const double* fj = H.df.component(j);
      for (std::size_t q = 0; q < g.points(); ++q) o[q] += pd * h[q] + 0.5 * pd * fi[q] * fj[q];
    }
  }
  for (std::size_t q = 0; q < g.points(); ++q) {
    c.df[q] = H.lap[q] + 0.5 * pd * H.gradsq[q] - 2.0 * s.factor.lambda * std::exp(-s.f[q]);
  }
  return c;
}

}  // namespace

double LiftReport::max() const { return std::max({g_ab, g_ij, F_beta, F_psi, g_mixed}); }

BlockState lift_state(const ReducedState& s) {
  s.validate();
  BlockState b{ScalarField(s.f.grid()), s.f, s.ghat, BlockForm(s.factor.pdim, s.psi, s.beta), s.factor, s.t};
  for (std::size_t q = 0; q < s.f.points(); ++q) b.fiber_coeff[q] = std::exp(s.f[q]);
  return b;
}

ReducedState reduce(const BlockState& b) {
  ReducedState s{b.ghat, b.warp, b.F.fiber, b.F.base, b.factor, b.t};
  s.validate();
  return s;
}

LiftReport lift_consistency_check(const ReducedState& s) {
  s.validate();
  const MetricField& g = s.ghat;
  const GridSpec& grid = g.grid();
  const std::size_t np = grid.size();
  const int p = s.p();
  const int pd = s.factor.pdim;
  const int sigma = s.sigma();
  const WarpedMetric wm{g, s.f, pd, sigma};

  const ReducedRhs lhs = rhs_reduced(s, Gauge::none);

  const WarpedBlocks u = warped_block_curvature_exp(s.factor, s.f, g);
  const FormSquare bs = form_square(g, s.beta);
  const FormSquare ps = form_square(g, s.psi);
  LiftReport rep;
  SymTensorField rhs_ij = u.ric_ij;
  rhs_ij *= -2.0;
  rhs_ij += ps.sq;
  for (std::size_t q = 0; q < np; ++q) {
    const double E = std::exp(-pd * s.f[q]);
    const double fnorm = ps.normsq[q] - sigma * E * bs.normsq[q];
    const double rhs_ab = -2.0 * u.ric_ab_coeff[q] - sigma * std::exp(-p * s.f[q]) * bs.normsq[q] -
                          fnorm * std::exp(s.f[q]) / 3.0;
    rep.g_ab = std::max(rep.g_ab, std::abs(std::exp(s.f[q]) * lhs.df[q] - rhs_ab));
    for (int c = 0; c < rhs_ij.channels(); ++c) {
      rhs_ij.channel(c)[q] += -sigma * E * bs.sq.channel(c)[q] - fnorm / 3.0 * g.tensor().channel(c)[q];
    }
  }
  rep.g_ij = diff_sup(lhs.dghat, rhs_ij);

  const BlockForm F(pd, s.psi, s.beta);
  BlockForm rhs_F = block_laplacian(wm, F);
  rhs_F *= -1.0;
  BlockForm forcing = block_d(block_star(wm, block_wedge(F, F)));
  forcing *= 0.5 * sigma;
  rhs_F -= forcing;
  rep.F_psi = diff_sup(lhs.dpsi, rhs_F.base);
  rep.F_beta = diff_sup(lhs.dbeta, rhs_F.fiber);

  if (pd == 1 && !s.beta.empty() && !s.psi.empty()) {
    const int n = g.dim();
    for (int i = 0; i < n; ++i) {
      VectorField e(grid);
      std::fill(e.component(i), e.component(i) + np, 1.0);
      const ScalarField m = pointwise_inner(g, s.beta, interior(e, s.psi));
      for (std::size_t q = 0; q < np; ++q) rep.g_mixed = std::max(rep.g_mixed, std::abs(m[q]));
    }
  }
  return rep;
}

ReducedRhs rhs_beta_only(const ReducedState& s) {
  s.validate();
  const MetricField& g = s.ghat;
  const int p = s.p();
  const int sigma = s.sigma();
  const double c = s.factor.c();
  Common cm = common_terms(s);
  const FormSquare bs = form_square(g, s.beta);
  for (std::size_t q = 0; q < g.points(); ++q) {
    const double E = std::exp(-(p + 1) * s.f[q]);
    cm.df[q] -= 2.0 / 3.0 * sigma * E * bs.normsq[q];
    for (int ch = 0; ch < cm.dg.channels(); ++ch) {
      cm.dg.channel(ch)[q] += -sigma * E * bs.sq.channel(ch)[q] +
                              sigma * E * bs.normsq[q] / 3.0 * g.tensor().channel(ch)[q];
    }
  }
  const double sp1 = (p % 2 == 0) ? -1.0 : 1.0;  // (-1)^{p+1}
  DifferentialForm dbeta = exterior_derivative(star_d_star(g, s.beta));
  dbeta *= -sp1;
  DifferentialForm second = star_d_star(g, exterior_derivative(s.beta));
  if (second.degree() == dbeta.degree()) dbeta += second;
  dbeta.axpy(sp1 * c, exterior_derivative(hodge_star(g, wedge(cm.dfform, hodge_star(g, s.beta)))));
  return ReducedRhs{std::move(cm.dg), std::move(cm.df), std::move(dbeta), DifferentialForm(g.grid(), 4)};
}

ReducedRhs rhs_psi_only(const ReducedState& s) {
  s.validate();
  const MetricField& g = s.ghat;
  const int p = s.p();
  const double c = s.factor.c();
  Common cm = common_terms(s);
  const FormSquare ps = form_square(g, s.psi);
  cm.dg += ps.sq;
  for (std::size_t q = 0; q < g.points(); ++q) {
    cm.df[q] -= ps.normsq[q] / 3.0;
    for (int ch = 0; ch < cm.dg.channels(); ++ch) cm.dg.channel(ch)[q] -= ps.normsq[q] / 3.0 * g.tensor().channel(ch)[q];
  }
  const double sp = (p % 2 == 0) ? 1.0 : -1.0;  // (-1)^p
  DifferentialForm dpsi(g.grid(), 4);
  if (!s.psi.empty()) {
    dpsi = exterior_derivative(star_d_star(g, s.psi));
    dpsi *= sp;
    if (g.dim() > 4) dpsi += star_d_star(g, exterior_derivative(s.psi));
    dpsi.axpy(sp * c, exterior_derivative(hodge_star(g, wedge(cm.dfform, hodge_star(g, s.psi)))));
  }
  return ReducedRhs{std::move(cm.dg), std::move(cm.df), DifferentialForm(g.grid(), s.beta.degree()), std::move(dpsi)};
}

SpecializationReport specialization_check(const ReducedState& s) {
  SpecializationReport rep;
  const bool no_psi = is_zero(s.psi);
  const bool no_beta = is_zero(s.beta);
  if (!no_psi && !no_beta) return rep;
  const ReducedRhs general = rhs_reduced(s, Gauge::none);
  const double scale = std::max(1.0, general.sup_norm());
  if (no_psi) rep.beta_path = max_diff(rhs_beta_only(s), general) / scale;
  if (no_beta) rep.psi_path = max_diff(rhs_psi_only(s), general) / scale;
  return rep;
}

void validate_psi_only(int p) {
  if (10 - p >= 8) {
    throw ConfigError("/initial/psi_only",
                      "a Psi-only run needs base dimension 10 - p <= 7; with p = " + std::to_string(p) +
                          " the Psi^Psi forcing does not vanish and closedness of F is not preserved");
  }
}

}  // namespace sgflow
