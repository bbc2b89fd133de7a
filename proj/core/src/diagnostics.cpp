#include "sgflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sgflow/error.hpp"
#include "sgflow/forms.hpp"
#include "sgflow/tensor.hpp"

namespace sgflow {
namespace {

double sup_of(const ScalarField& s) {
  double m = 0.0;
  for (std::size_t p = 0; p < s.points(); ++p) m = std::max(m, s[p]);
  return m;
}

double sup_abs(const ScalarField& s) {
  double m = 0.0;
  for (std::size_t p = 0; p < s.points(); ++p) m = std::max(m, std::abs(s[p]));
  return m;
}

double sup_sqrt(const ScalarField& s) { return std::sqrt(std::max(0.0, sup_of(s))); }

void add_scaled_metric(SymTensorField& t, double a, const ScalarField& s, const MetricField& g) {
  for (int c = 0; c < t.channels(); ++c) {
    double* dst = t.channel(c);
    const double* src = g.tensor().channel(c);
    for (std::size_t p = 0; p < t.points(); ++p) dst[p] += a * s[p] * src[p];
  }
}

bool forcing_present(int n, int k) { return 3 * k - 1 == n; }

BlockForm block_F(const ReducedState& s) { return BlockForm(s.factor.pdim, s.psi, s.beta); }

}  // namespace

ScalarField symmetric_norm(const MetricField& g, const SymTensorField& t) {
  ScalarField out = norm_squared(g, TensorField::from_symmetric(t));
  for (std::size_t p = 0; p < out.points(); ++p) out[p] = std::sqrt(std::max(0.0, out[p]));
  return out;
}

FieldResidual field_equation_residual(const MetricField& g, const DifferentialForm& F, int sigma,
                                      const SymTensorField* ricci_override) {
  const int n = g.dim();
  const int k = F.degree();
  FieldResidual out;
  out.r1 = exterior_derivative(hodge_star(g, sigma, F));
  if (forcing_present(n, k)) out.r1.axpy(-0.5, wedge(F, F));
  out.r2 = ricci_override ? *ricci_override : ricci(g);
  const FormSquare fs = form_square(g, F);
  out.r2.axpy(-0.5, fs.sq);
  add_scaled_metric(out.r2, 1.0 / 6.0, fs.normsq, g);
  out.r1_sup = out.r1.empty() ? 0.0 : sup_pointwise_norm(g, out.r1);
  out.r2_sup = sup_of(symmetric_norm(g, out.r2));
  return out;
}

SymTensorField einstein_residual_direct(const MetricField& g, const SymTensorField& ric, const DifferentialForm& F) {
  const int n = g.dim();
  const int k = F.degree();
  SymTensorField out = ric;
  if (F.empty()) return out;
  double fact_km1 = 1.0;
  for (int i = 2; i < k; ++i) fact_km1 *= i;
  int total = 1;
  for (int i = 0; i < k - 1; ++i) total *= n;
  double gi[kMaxDim * kMaxDim];
  int a[kMaxDim + 1], b[kMaxDim + 1];
  for (std::size_t p = 0; p < g.points(); ++p) {
    g.inverse_matrix(p, gi);
    double normsq = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int ia = 0; ia < total; ++ia) {
          a[0] = i;
          for (int r = 1, x = ia; r < k; ++r, x /= n) a[r] = x % n;
          const double fa = F.value(a, p);
          if (fa == 0.0) continue;
          for (int ib = 0; ib < total; ++ib) {
            b[0] = j;
            double w = 1.0;
            for (int r = 1, x = ib; r < k; ++r, x /= n) {
              b[r] = x % n;
              w *= gi[a[r] * n + b[r]];
            }
            if (w != 0.0) s += fa * w * F.value(b, p);
          }
        }
        s /= fact_km1;
        out.component(i, j)[p] -= 0.5 * s;
        normsq += (i == j ? 1.0 : 2.0) * gi[i * n + j] * s;
      }
    }
    normsq /= k;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) out.component(i, j)[p] += normsq / 6.0 * g.g(i, j, p);
  }
  return out;
}

ReducedFieldResidual field_equation_residual(const ReducedState& s, const SymTensorField* base_ricci) {
  s.validate();
  const WarpedMetric wm{s.ghat, s.f, s.factor.pdim, s.sigma()};
  const GridSpec& grid = s.ghat.grid();
  const std::size_t np = grid.size();
  const int p = s.p();
  const int sigma = s.sigma();
  ReducedFieldResidual out;
  const BlockForm F = block_F(s);
  out.r1 = block_d(block_star(wm, F));
  BlockForm ff = block_wedge(F, F);
  ff *= 0.5;
  out.r1 -= ff;
  out.r1_sup = block_sup_norm(wm, out.r1);

  const WarpedBlocks wb = warped_block_curvature(s.factor, s.f, s.ghat, base_ricci);
  const FormSquare bs = form_square(s.ghat, s.beta);
  const FormSquare ps = form_square(s.ghat, s.psi);
  out.r2_ab_coeff = wb.ric_ab_coeff;
  out.r2_ij = wb.ric_ij;
  ScalarField fnorm(grid), ef(grid);
  for (std::size_t q = 0; q < np; ++q) {
    const double E = std::exp(-(p + 1) * s.f[q]);
    fnorm[q] = ps.normsq[q] - sigma * E * bs.normsq[q];
    out.r2_ab_coeff[q] += 0.5 * sigma * std::exp(-p * s.f[q]) * bs.normsq[q] + fnorm[q] * std::exp(s.f[q]) / 6.0;
    ef[q] = E;
  }
  out.r2_ij.axpy(-0.5, ps.sq);
  for (int c = 0; c < out.r2_ij.channels(); ++c) {
    double* dst = out.r2_ij.channel(c);
    const double* b2 = bs.sq.channel(c);
    for (std::size_t q = 0; q < np; ++q) dst[q] += 0.5 * sigma * ef[q] * b2[q];
  }
  add_scaled_metric(out.r2_ij, 1.0 / 6.0, fnorm, s.ghat);
  const ScalarField nij = symmetric_norm(s.ghat, out.r2_ij);
  for (std::size_t q = 0; q < np; ++q) {
    const double ab = std::abs(out.r2_ab_coeff[q]) * std::exp(-s.f[q]);
    out.r2_ab_sup = std::max(out.r2_ab_sup, ab);
    out.r2_ij_sup = std::max(out.r2_ij_sup, nij[q]);
    out.r2_sup = std::max(out.r2_sup, std::sqrt((p + 1) * ab * ab + nij[q] * nij[q]));
  }
  return out;
}

AlphaCheck alpha_form_check(const MetricField& g, const DifferentialForm& F, int sigma) {
  const int n = g.dim();
  const int k = F.degree();
  DifferentialForm alpha = hodge_star(g, sigma, exterior_derivative(hodge_star(g, sigma, F)));
  if (forcing_present(n, k)) alpha.axpy(-0.5, hodge_star(g, sigma, wedge(F, F)));
  AlphaCheck out;
  if (alpha.empty()) return out;
  out.alpha = sup_pointwise_norm(g, alpha);
  out.d_alpha = sup_pointwise_norm(g, exterior_derivative(alpha));
  out.codiff_alpha = sup_pointwise_norm(g, codifferential(g, alpha));
  return out;
}

AlphaCheck alpha_form_check(const ReducedState& s) {
  s.validate();
  const WarpedMetric wm{s.ghat, s.f, s.factor.pdim, s.sigma()};
  const BlockForm F = block_F(s);
  BlockForm alpha = block_star(wm, block_d(block_star(wm, F)));
  BlockForm ff = block_star(wm, block_wedge(F, F));
  ff *= 0.5;
  alpha -= ff;
  AlphaCheck out;
  out.alpha = block_sup_norm(wm, alpha);
  out.d_alpha = block_sup_norm(wm, block_d(alpha));
  out.codiff_alpha = block_sup_norm(wm, block_codifferential(wm, alpha));
  return out;
}

EuclideanShi shi_quantities(const EuclideanState& s, const ShiConstants& k) {
  const MetricField& g = s.g;
  const CurvatureBundle cb = curvature_suite(g);
  const int m = std::clamp(k.m, 1, 3);
  const double t = s.t;
  const ScalarField F2 = norm_squared(g, s.F);
  std::vector<ScalarField> dF;  // |∇^i F|², i = 1..m
  std::vector<ScalarField> dR;  // |∇^i Rm|², i = 0..m-1
  TensorField T = TensorField::from_form(s.F);
  for (int i = 1; i <= m; ++i) {
    T = covariant_derivative(cb.christoffels, T);
    dF.push_back(norm_squared(g, T));
  }
  TensorField R = cb.riemann;
  dR.push_back(cb.norm_rm);
  for (int i = 1; i < m; ++i) {
    R = covariant_derivative(cb.christoffels, R);
    dR.push_back(norm_squared(g, R));
  }
  EuclideanShi out;
  out.m = m;
  out.G.assign(m, 0.0);
  for (std::size_t p = 0; p < g.points(); ++p) {
    const double f2 = F2[p];
    const double g1 = t * ((f2 + k.A) * dF[0][p] + dR[0][p]) + k.A1 * f2;
    out.G[0] = std::max(out.G[0], g1);
    if (m >= 2) {
      const double g2 = t * t * (dF[1][p] + dR[1][p]) + k.A1 * t * ((k.A + f2) * dF[0][p] + dR[0][p]) + k.A2 * f2;
      out.G[1] = std::max(out.G[1], g2);
    }
    if (m >= 3) {
      const double g3 = t * t * t * (dF[2][p] + dR[2][p]) + k.A2 * t * t * (dF[1][p] + dR[1][p]) +
                        k.A1 * t * ((k.A0 + f2) * dF[0][p] + dR[0][p]) + k.B * f2;
      out.G[2] = std::max(out.G[2], g3);
    }
  }
  return out;
}

ReducedShi shi_quantities(const ReducedState& s, const ShiConstants& k) {
  const MetricField& g = s.ghat;
  const CurvatureBundle cb = curvature_suite(g);
  const int m = std::clamp(k.m, 1, 3);
  const double t = s.t;
  const std::size_t np = g.points();
  // |∇^i f|² for i = 1..m+1, |∇^i β|², |∇^i Ψ|² for i = 1..m, |∇^i Rm|² for i = 0..m-1.
  auto ladder = [&](TensorField T, int count) {
    std::vector<ScalarField> out;
    for (int i = 1; i <= count; ++i) {
      T = covariant_derivative(cb.christoffels, T);
      out.push_back(norm_squared(g, T));
    }
    return out;
  };
  const std::vector<ScalarField> df = ladder(TensorField::from_scalar(s.f), m + 1);
  const std::vector<ScalarField> db = ladder(TensorField::from_form(s.beta), m);
  const std::vector<ScalarField> dp = ladder(TensorField::from_form(s.psi), m);
  std::vector<ScalarField> dR{cb.norm_rm};
  {
    TensorField R = cb.riemann;
    for (int i = 1; i < m; ++i) {
      R = covariant_derivative(cb.christoffels, R);
      dR.push_back(norm_squared(g, R));
    }
  }
  const ScalarField b2 = norm_squared(g, s.beta);
  const ScalarField p2 = norm_squared(g, s.psi);
  auto B = [&](int i) { return i < static_cast<int>(k.Bi.size()) ? k.Bi[i] : 1.0; };

  ReducedShi out;
  out.m = m;
  out.G.assign(m + 1, 0.0);
  out.H = 0.0;
  std::vector<double> Gp(m + 1);
  for (std::size_t q = 0; q < np; ++q) {
    const double lower = df[0][q] + b2[q] + p2[q];
    Gp[0] = t * lower + k.A0 * s.f[q] * s.f[q];
    Gp[1] = (p2[q] + k.A1) * dp[0][q] + (b2[q] + k.A2) * db[0][q] + dR[0][q] + df[1][q];
    for (int i = 2; i <= m; ++i) Gp[i] = dR[i - 1][q] + df[i][q] + db[i - 1][q] + dp[i - 1][q];
    double h = std::pow(t, m) * Gp[m] + B(0) * lower;
    for (int i = 1; i < m; ++i) h += B(i) * std::pow(t, i) * Gp[i];
    for (int i = 0; i <= m; ++i) out.G[i] = std::max(out.G[i], Gp[i]);
    out.H = std::max(out.H, h);
  }
  return out;
}

ActionValue action(const MetricField& g, const DifferentialForm& F, const DifferentialForm* potential,
                   const SymTensorField* ricci_override) {
  ActionValue out;
  const SymTensorField ric = ricci_override ? *ricci_override : ricci(g);
  out.einstein = integrate(g, trace(g, ric));
  out.kinetic = -0.5 * integrate(g, norm_squared(g, F));
  if (potential) {
    DifferentialForm mismatch = exterior_derivative(*potential);
    mismatch -= F;
    if (mismatch.sup_norm() > 1e-8) {
      throw PotentialMismatchError("action: dA differs from F by " + std::to_string(mismatch.sup_norm()));
    }
    const DifferentialForm top = wedge(wedge(F, F), *potential);
    if (top.degree() == g.dim() && !top.empty()) {
      double acc = 0.0;
      for (std::size_t p = 0; p < g.points(); ++p) acc += top.channel(0)[p];
      out.chern_simons = acc * g.grid().cell_volume() / 6.0;
      out.chern_simons_included = true;
    }
  }
  out.value = out.einstein + out.kinetic + out.chern_simons;
  return out;
}

ActionValue action(const ReducedState& s, const SymTensorField* base_ricci) {
  s.validate();
  const WarpedBlocks wb = warped_block_curvature(s.factor, s.f, s.ghat, base_ricci);
  const ScalarField tr = trace(s.ghat, wb.ric_ij);
  const ScalarField b2 = norm_squared(s.ghat, s.beta);
  const ScalarField p2 = norm_squared(s.ghat, s.psi);
  const int pd = s.factor.pdim;
  const double c = s.factor.c();
  ScalarField R(s.f.grid()), K(s.f.grid());
  for (std::size_t q = 0; q < R.points(); ++q) {
    const double w = std::exp(c * s.f[q]);
    R[q] = (pd * std::exp(-s.f[q]) * wb.ric_ab_coeff[q] + tr[q]) * w;
    K[q] = -0.5 * (p2[q] - s.sigma() * std::exp(-pd * s.f[q]) * b2[q]) * w;
  }
  ActionValue out;
  out.einstein = integrate(s.ghat, R);
  out.kinetic = integrate(s.ghat, K);
  out.value = out.einstein + out.kinetic;
  return out;
}

ExtremumSample extremum_sample(const ScalarField& f, long step, double t) { return {step, t, f.max(), f.min()}; }

std::vector<ExtremumViolation> extremum_monitor(const std::vector<ExtremumSample>& samples, double dt, double h) {
  std::vector<ExtremumViolation> out;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const ExtremumSample& a = samples[i - 1];
    const ExtremumSample& b = samples[i];
    const long steps = std::max<long>(1, b.step - a.step);
    const double tol = steps * 10.0 * (dt + h * h) * (1.0 + std::max(std::abs(a.max), std::abs(a.min)));
    if (b.max - a.max > tol) out.push_back({b.step, b.t, "max_increase", b.max - a.max, tol});
    if (a.min - b.min > tol) out.push_back({b.step, b.t, "min_decrease", a.min - b.min, tol});
  }
  return out;
}

std::optional<double> c0_ratio(const MetricField& g, const DifferentialForm& F, int sigma) {
  const int n = g.dim();
  const int k = F.degree();
  if (!forcing_present(n, k) || F.empty()) return std::nullopt;
  const DifferentialForm term = exterior_derivative(hodge_star(g, sigma, wedge(F, F)));
  const ScalarField num = pointwise_inner(g, F, term);
  const ScalarField f2 = norm_squared(g, F);
  const ScalarField df2 = norm_squared(g, covariant_derivative(christoffels(g), TensorField::from_form(F)));
  double top = 0.0, bottom = 0.0;
  for (std::size_t p = 0; p < g.points(); ++p) {
    top = std::max(top, std::abs(num[p]));
    bottom = std::max(bottom, std::sqrt(std::max(0.0, df2[p])) * f2[p]);
  }
  if (bottom == 0.0) return std::nullopt;
  return top / bottom;
}

DiagnosticsRecord make_record(const ReducedState& s, long step, double dt, const DiagnosticsOptions& opt,
                              const RhsFunction<ReducedState, ReducedRhs>* rhs) {
  DiagnosticsRecord r;
  r.step = step;
  r.t = s.t;
  r.dt = dt;
  r.sup_f = sup_abs(s.f);
  r.sup_beta = sup_pointwise_norm(s.ghat, s.beta);
  r.sup_psi = sup_pointwise_norm(s.ghat, s.psi);
  r.sup_grad_f = sup_sqrt(hessian_and_laplacian(s.ghat, s.f).gradsq);
  r.closed_beta = exterior_derivative(s.beta).sup_norm();
  r.closed_psi = exterior_derivative(s.psi).sup_norm();
  if (opt.curvature) r.sup_rm = sup_sqrt(curvature_suite(s.ghat).norm_rm);
  if (opt.field_equations) {
    const ReducedFieldResidual fr = field_equation_residual(s, opt.base_ricci);
    r.r1 = fr.r1_sup;
    r.r2 = fr.r2_sup;
  }
  if (rhs) r.stationary = (*rhs)(s).sup_norm();
  if (opt.alpha) {
    const AlphaCheck a = alpha_form_check(s);
    r.d_alpha = a.d_alpha;
    r.codiff_alpha = a.codiff_alpha;
  }
  if (opt.shi) {
    const ReducedShi sh = shi_quantities(s, opt.constants);
    for (int i = 0; i <= sh.m; ++i) r.shi["G" + std::to_string(i)] = sh.G[i];
    r.shi["H"] = sh.H;
    r.shi_m = sh.m;
  }
  if (opt.action) r.action = action(s, opt.base_ricci).value;
  return r;
}

DiagnosticsRecord make_record(const EuclideanState& s, long step, double dt, const DiagnosticsOptions& opt,
                              const RhsFunction<EuclideanState, EuclideanRhs>* rhs) {
  DiagnosticsRecord r;
  r.step = step;
  r.t = s.t;
  r.dt = dt;
  r.sup_F = sup_pointwise_norm(s.g, s.F);
  r.closed_F = exterior_derivative(s.F).sup_norm();
  const ChristoffelField gamma = christoffels(s.g);
  r.sup_grad_F = sup_sqrt(norm_squared(s.g, covariant_derivative(gamma, TensorField::from_form(s.F))));
  if (opt.curvature) r.sup_rm = sup_sqrt(curvature_suite(s.g).norm_rm);
  if (opt.field_equations) {
    const FieldResidual fr = field_equation_residual(s.g, s.F, s.sigma);
    r.r1 = fr.r1_sup;
    r.r2 = fr.r2_sup;
  }
  if (rhs) r.stationary = (*rhs)(s).sup_norm();
  if (opt.alpha) {
    const AlphaCheck a = alpha_form_check(s.g, s.F, s.sigma);
    r.d_alpha = a.d_alpha;
    r.codiff_alpha = a.codiff_alpha;
  }
  if (opt.shi) {
    const EuclideanShi sh = shi_quantities(s, opt.constants);
    for (int i = 0; i < sh.m; ++i) r.shi["G" + std::to_string(i + 1)] = sh.G[i];
    r.shi_m = sh.m;
  }
  if (opt.action) r.action = action(s.g, s.F).value;
  r.c0 = c0_ratio(s.g, s.F, s.sigma);
  return r;
}

}  // namespace sgflow
