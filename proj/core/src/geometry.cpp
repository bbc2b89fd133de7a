#include "sgflow/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <type_traits>
#include <vector>

#include "detail.hpp"
#include "sgflow/error.hpp"
#include "sgflow/forms.hpp"

namespace sgflow {

namespace {

template <class Fn>
void dispatch_dim(int n, Fn&& fn) {
  switch (n) {
    case 1: fn(std::integral_constant<int, 1>{}); break;
    case 2: fn(std::integral_constant<int, 2>{}); break;
    case 3: fn(std::integral_constant<int, 3>{}); break;
    case 4: fn(std::integral_constant<int, 4>{}); break;
    case 5: fn(std::integral_constant<int, 5>{}); break;
    case 6: fn(std::integral_constant<int, 6>{}); break;
    case 7: fn(std::integral_constant<int, 7>{}); break;
    case 8: fn(std::integral_constant<int, 8>{}); break;
    case 9: fn(std::integral_constant<int, 9>{}); break;
    default: fn(std::integral_constant<int, kMaxDim>{}); break;
  }
}

constexpr int sym(int n, int i, int j) { return i <= j ? i * n - i * (i - 1) / 2 + (j - i) : sym(n, j, i); }

// Adds C_q Γ^q_ij - Γ^k_jq Γ^q_ik to ric; gam[k * ns + c] = Γ^k_c.
template <int N>
void ricci_quadratic(std::size_t np, const double* const* gam, const double* const* C, double* const* ric) {
  constexpr int ns = N * (N + 1) / 2;
  for (std::size_t p = 0; p < np; ++p) {
    double G[N][N][N];
    double c[N];
    for (int k = 0; k < N; ++k)
      for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) G[k][i][j] = G[k][j][i] = gam[k * ns + sym(N, i, j)][p];
    for (int i = 0; i < N; ++i) c[i] = C[i][p];
    for (int i = 0; i < N; ++i) {
      for (int j = i; j < N; ++j) {
        double acc = 0.0;
        for (int q = 0; q < N; ++q) acc += c[q] * G[q][i][j];
        for (int k = 0; k < N; ++k)
          for (int q = 0; q < N; ++q) acc -= G[k][j][q] * G[q][i][k];
        ric[sym(N, i, j)][p] += acc;
      }
    }
  }
}

}  // namespace

ChristoffelField christoffels(const MetricField& g) {
  const GridSpec& grid = g.grid();
  const int n = g.dim();
  const std::size_t np = grid.size();
  ChristoffelField gamma(grid);
  if (g.uniform()) return gamma;
  // dg[m][i][j] = ∂_m g_ij
  std::vector<std::vector<double>> dg(static_cast<std::size_t>(n) * n * n);
  for (int m = 0; m < n; ++m) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        std::vector<double>& d = dg[(m * n + i) * n + j];
        d.resize(np);
        stencil::centered(grid, m, g.tensor().component(i, j), d.data());
      }
    }
  }
  const auto D = [&](int m, int i, int j) { return dg[(m * n + std::min(i, j)) * n + std::max(i, j)].data(); };
  std::vector<double> lower(np);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        const double* a = D(i, l, j);
        const double* b = D(j, l, i);
        const double* c = D(l, i, j);
        for (std::size_t p = 0; p < np; ++p) lower[p] = 0.5 * (a[p] + b[p] - c[p]);
        for (int k = 0; k < n; ++k) {
          double* __restrict out = gamma.component(k, i, j);
          const double* gi = g.inverse().component(k, l);
          for (std::size_t p = 0; p < np; ++p) out[p] += gi[p] * lower[p];
        }
      }
    }
  }
  return gamma;
}

SymTensorField ricci(const MetricField& g, const ChristoffelField& gamma) {
  const GridSpec& grid = g.grid();
  const int n = g.dim();
  const int ns = n * (n + 1) / 2;
  const std::size_t np = grid.size();
  SymTensorField ric(grid);
  if (g.uniform()) return ric;
  // C_i = Γ^k_ik
  VectorField C(grid);
  for (int i = 0; i < n; ++i) {
    double* ci = C.component(i);
    for (int k = 0; k < n; ++k) {
      const double* src = gamma.component(k, i, k);
      for (std::size_t p = 0; p < np; ++p) ci[p] += src[p];
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double* r = ric.component(i, j);
      for (int k = 0; k < n; ++k) stencil::add_centered(grid, k, 1.0, gamma.component(k, i, j), r);
      stencil::add_centered(grid, j, -0.5, C.component(i), r);
      stencil::add_centered(grid, i, -0.5, C.component(j), r);
    }
  }
  std::vector<const double*> gam(static_cast<std::size_t>(n) * ns), cp(n);
  std::vector<double*> rp(ns);
  for (int k = 0; k < n; ++k)
    for (int c = 0; c < ns; ++c) gam[k * ns + c] = gamma.channel(k * ns + c);
  for (int i = 0; i < n; ++i) cp[i] = C.component(i);
  for (int c = 0; c < ns; ++c) rp[c] = ric.channel(c);
  dispatch_dim(n, [&](auto N) { ricci_quadratic<N>(np, gam.data(), cp.data(), rp.data()); });
  return ric;
}

SymTensorField ricci(const MetricField& g) { return ricci(g, christoffels(g)); }

ScalarField trace(const MetricField& g, const SymTensorField& t) {
  require_same_grid(g.grid(), t.grid(), "trace");
  const int n = g.dim();
  ScalarField out(g.grid());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double* gi = g.inverse().component(i, j);
      const double* tj = t.component(i, j);
      for (std::size_t p = 0; p < out.points(); ++p) out[p] += gi[p] * tj[p];
    }
  }
  return out;
}

TensorField riemann_tensor(const MetricField& g, const ChristoffelField& gamma) {
  const GridSpec& grid = g.grid();
  const int n = g.dim();
  const std::size_t np = grid.size();
  TensorField rm(grid, {2, 2}, 4.0);
  if (g.uniform() || n < 2) return rm;
  const int ng = gamma.channels();
  // dG[m * ng + c] = ∂_m Γ_c
  std::vector<double> dG(static_cast<std::size_t>(n) * ng * np);
  for (int m = 0; m < n; ++m)
    for (int c = 0; c < ng; ++c) stencil::centered(grid, m, gamma.channel(c), dG.data() + (m * ng + c) * np);
  const int nsym = n * (n + 1) / 2;
  auto dgam = [&](int m, int l, int i, int j, std::size_t p) {
    return dG[(m * ng + l * nsym + SymTensorField::index(n, i, j)) * np + p];
  };
  const auto& basis = ExteriorBasis::get(n);
  const int c2 = basis.count(2);
  std::vector<std::array<int, 2>> pairs(c2);
  for (int a = 0; a < c2; ++a) ExteriorBasis::axes(basis.mask(2, a), pairs[a].data());

  const std::size_t n4 = static_cast<std::size_t>(n) * n * n * n;
  std::vector<double> up(n4), R(n4), S(n4);
  auto at = [n](int a, int b, int c, int d) { return ((a * n + b) * n + c) * n + d; };
  double G[kMaxDim][kMaxDim][kMaxDim];
  double gm[kMaxDim * kMaxDim];
  for (std::size_t p = 0; p < np; ++p) {
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) G[k][i][j] = G[k][j][i] = gamma.component(k, i, j)[p];
    g.matrix(p, gm);
    // R^l_{kij} = ∂_i Γ^l_jk - ∂_j Γ^l_ik + Γ^l_im Γ^m_jk - Γ^l_jm Γ^m_ik
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            double v = dgam(i, l, j, k, p) - dgam(j, l, i, k, p);
            for (int m = 0; m < n; ++m) v += G[l][i][m] * G[m][j][k] - G[l][j][m] * G[m][i][k];
            up[at(l, k, i, j)] = v;
          }
    for (int a = 0; a < n; ++a)
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            double v = 0.0;
            for (int l = 0; l < n; ++l) v += gm[a * n + l] * up[at(l, k, i, j)];
            R[at(a, k, i, j)] = v;
          }
    // Antisymmetrize both pairs, symmetrize under pair exchange.
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            const double x = 0.25 * (R[at(a, b, c, d)] - R[at(b, a, c, d)] - R[at(a, b, d, c)] + R[at(b, a, d, c)]);
            const double y = 0.25 * (R[at(c, d, a, b)] - R[at(d, c, a, b)] - R[at(c, d, b, a)] + R[at(d, c, b, a)]);
            S[at(a, b, c, d)] = 0.5 * (x + y);
          }
    // Remove the totally antisymmetric part; for a tensor with the pair
    // symmetries above it equals the cyclic sum over the last three slots / 3.
    for (int a = 0; a < c2; ++a) {
      for (int b = 0; b < c2; ++b) {
        const int i = pairs[a][0], j = pairs[a][1], k = pairs[b][0], l = pairs[b][1];
        const double cyc = (S[at(i, j, k, l)] + S[at(i, k, l, j)] + S[at(i, l, j, k)]) / 3.0;
        rm.channel(a * c2 + b)[p] = S[at(i, j, k, l)] - cyc;
      }
    }
  }
  return rm;
}

CurvatureBundle curvature_suite(const MetricField& g) {
  CurvatureBundle b;
  b.christoffels = christoffels(g);
  b.riemann = riemann_tensor(g, b.christoffels);
  b.ricci = ricci(g, b.christoffels);
  b.scalar = trace(g, b.ricci);
  b.norm_rm = norm_squared(g, b.riemann);
  for (double& v : b.norm_rm.raw()) v = std::sqrt(std::max(0.0, v));
  return b;
}

Hessian hessian_and_laplacian(const MetricField& g, const ChristoffelField& gamma, const ScalarField& f) {
  require_same_grid(g.grid(), f.grid(), "hessian_and_laplacian");
  const GridSpec& grid = g.grid();
  const int n = g.dim();
  const std::size_t np = grid.size();
  Hessian h{SymTensorField(grid), ScalarField(grid), ScalarField(grid), VectorField(grid)};
  for (int i = 0; i < n; ++i) stencil::centered(grid, i, f.data(), h.df.component(i));
  for (int i = 0; i < n; ++i) {
    stencil::second(grid, i, f.data(), h.hess.component(i, i));
    for (int j = i + 1; j < n; ++j) stencil::centered(grid, j, h.df.component(i), h.hess.component(i, j));
  }
  if (!g.uniform()) {
    for (int k = 0; k < n; ++k) {
      const double* fk = h.df.component(k);
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          const double* gam = gamma.component(k, i, j);
          double* dst = h.hess.component(i, j);
          for (std::size_t p = 0; p < np; ++p) dst[p] -= gam[p] * fk[p];
        }
      }
    }
  }
  h.lap = trace(g, h.hess);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double* gi = g.inverse().component(i, j);
      const double* fi = h.df.component(i);
      const double* fj = h.df.component(j);
      for (std::size_t p = 0; p < np; ++p) h.gradsq[p] += gi[p] * fi[p] * fj[p];
    }
  }
  return h;
}

Hessian hessian_and_laplacian(const MetricField& g, const ScalarField& f) {
  return hessian_and_laplacian(g, christoffels(g), f);
}

void EinsteinFactor::validate(bool allow_unnormalized) const {
  if (pdim < 1 || pdim > 11) throw ShapeError("EinsteinFactor: p+1 must be in 1..11");
  if (sigma != 1 && sigma != -1) throw ShapeError("EinsteinFactor: sigma must be +1 or -1");
  if (!allow_unnormalized && lambda != -1.0 && lambda != 0.0 && lambda != 1.0) {
    throw ShapeError("EinsteinFactor: lambda must be normalized to -1, 0 or +1");
  }
}

namespace {

SymTensorField base_ricci_or(const MetricField& ghat, const ChristoffelField& gamma, const SymTensorField* base) {
  if (base) {
    require_same_grid(base->grid(), ghat.grid(), "warped_block_curvature");
    return *base;
  }
  return ricci(ghat, gamma);
}

}  // namespace

WarpedBlocks warped_block_curvature(const EinsteinFactor& factor, const ScalarField& f, const MetricField& ghat,
                                    const SymTensorField* base_ricci) {
  const ChristoffelField gamma = christoffels(ghat);
  const Hessian h = hessian_and_laplacian(ghat, gamma, f);
  const double c = factor.c();
  const int n = ghat.dim();
  const std::size_t np = f.points();
  WarpedBlocks out{ScalarField(f.grid()), base_ricci_or(ghat, gamma, base_ricci)};
  for (std::size_t p = 0; p < np; ++p)
    out.ric_ab_coeff[p] = factor.lambda - 0.5 * std::exp(f[p]) * (h.lap[p] + c * h.gradsq[p]);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double* r = out.ric_ij.component(i, j);
      const double* hs = h.hess.component(i, j);
      const double* fi = h.df.component(i);
      const double* fj = h.df.component(j);
      for (std::size_t p = 0; p < np; ++p) r[p] -= c * (hs[p] + 0.5 * fi[p] * fj[p]);
    }
  }
  return out;
}

WarpedBlocks warped_block_curvature_exp(const EinsteinFactor& factor, const ScalarField& f, const MetricField& ghat,
                                        const SymTensorField* base_ricci) {
  const ChristoffelField gamma = christoffels(ghat);
  const double c = factor.c();
  const int n = ghat.dim();
  const std::size_t np = f.points();
  ScalarField ec(f.grid()), u(f.grid());
  for (std::size_t p = 0; p < np; ++p) {
    ec[p] = std::exp(c * f[p]);
    u[p] = std::exp(0.5 * f[p]);
  }
  const Hessian hc = hessian_and_laplacian(ghat, gamma, ec);
  const Hessian hu = hessian_and_laplacian(ghat, gamma, u);
  WarpedBlocks out{ScalarField(f.grid()), base_ricci_or(ghat, gamma, base_ricci)};
  for (std::size_t p = 0; p < np; ++p)
    out.ric_ab_coeff[p] = factor.lambda - std::exp(f[p]) * hc.lap[p] / (ec[p] * factor.pdim);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double* r = out.ric_ij.component(i, j);
      const double* hs = hu.hess.component(i, j);
      for (std::size_t p = 0; p < np; ++p) r[p] -= factor.pdim * hs[p] / u[p];
    }
  }
  return out;
}

double WarpedStarReport::max() const {
  return std::max({star_beta, star_psi, square_ab, square_ij, square_mixed, normsq});
}

namespace {

// Pointwise algebra on the product space R^{p+1} x R^n with a block-diagonal
// metric whose fiber part is diagonal. Forms are sparse maps mask -> value;
// fiber axes come first.
class ProductPoint {
 public:
  ProductPoint(int pdim, int n, int sigma, double f, const double* ghat_inv, double sqrtdet_hat)
      : pdim_(pdim), n_(n), dim_(pdim + n) {
    std::fill(std::begin(ginv_), std::end(ginv_), 0.0);
    for (int a = 0; a < pdim; ++a) ginv_[a * dim_ + a] = std::exp(-f) * ((a == 0 && sigma == 1) ? -1.0 : 1.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) ginv_[(pdim + i) * dim_ + pdim + j] = ghat_inv[i * n + j];
    root_ = std::exp(0.5 * pdim * f) * sqrtdet_hat;
    fiber_ = (Mask{1} << pdim) - 1;
  }

  Mask fiber() const { return fiber_; }
  Mask full() const { return (Mask{1} << dim_) - 1; }

  double G(Mask I, Mask J) const {
    if ((I & fiber_) != (J & fiber_)) return 0.0;
    int ii[22], jj[22];
    const int k = ExteriorBasis::axes(I, ii);
    ExteriorBasis::axes(J, jj);
    double m[22 * 22];
    for (int r = 0; r < k; ++r)
      for (int s = 0; s < k; ++s) m[r * k + s] = ginv_[ii[r] * dim_ + jj[s]];
    return k == 0 ? 1.0 : detail::small_det(m, k);
  }

  // Masks sharing the fiber part of J, same degree.
  std::vector<Mask> partners(Mask J) const {
    std::vector<Mask> out;
    const int kb = popcount(J & ~fiber_);
    for (Mask b : ExteriorBasis::get(n_).masks(kb)) out.push_back((J & fiber_) | (b << pdim_));
    return out;
  }

  std::map<Mask, double> star(const std::map<Mask, double>& a) const {
    std::map<Mask, double> out;
    for (const auto& [J, v] : a) {
      for (Mask I : partners(J)) {
        const double gij = G(I, J);
        if (gij == 0.0) continue;
        const Mask Ic = full() & ~I;
        out[Ic] += root_ * merge_sign(I, Ic) * gij * v;
      }
    }
    return out;
  }

  double inner(const std::map<Mask, double>& a, const std::map<Mask, double>& b) const {
    double acc = 0.0;
    for (const auto& [I, x] : a)
      for (const auto& [J, y] : b) acc += x * y * G(I, J);
    return acc;
  }

  std::map<Mask, double> contract(int axis, const std::map<Mask, double>& a) const {
    std::map<Mask, double> out;
    const Mask bit = Mask{1} << axis;
    for (const auto& [I, v] : a) {
      if (!(I & bit)) continue;
      out[I & ~bit] += merge_sign(bit, I & ~bit) * v;
    }
    return out;
  }

  int dim() const { return dim_; }

 private:
  int pdim_, n_, dim_;
  double ginv_[22 * 22];
  double root_ = 1.0;
  Mask fiber_ = 0;
};

double compare(const std::map<Mask, double>& dense, const std::map<Mask, double>& expect) {
  double err = 0.0;
  for (const auto& [m, v] : dense) {
    const auto it = expect.find(m);
    err = std::max(err, std::abs(v - (it == expect.end() ? 0.0 : it->second)));
  }
  for (const auto& [m, v] : expect)
    if (!dense.count(m)) err = std::max(err, std::abs(v));
  return err;
}

}  // namespace

WarpedStarReport warped_hodge_star_identities(const EinsteinFactor& factor, const ScalarField& f,
                                              const MetricField& ghat, const DifferentialForm& beta,
                                              const DifferentialForm& psi) {
  const GridSpec& grid = ghat.grid();
  require_same_grid(grid, f.grid(), "warped_hodge_star_identities");
  require_same_grid(grid, beta.grid(), "warped_hodge_star_identities");
  require_same_grid(grid, psi.grid(), "warped_hodge_star_identities");
  const int n = ghat.dim();
  const int pdim = factor.pdim;
  const int p = factor.p();
  const int sigma = factor.sigma;
  const double c = factor.c();
  if (pdim + n > 22) throw ShapeError("warped_hodge_star_identities: total dimension too large");
  const auto& basis = ExteriorBasis::get(n);

  const DifferentialForm star_b = hodge_star(ghat, beta);
  const DifferentialForm star_p = hodge_star(ghat, psi);
  const FormSquare sq_b = form_square(ghat, beta);
  const FormSquare sq_p = form_square(ghat, psi);

  WarpedStarReport rep;
  double gi[kMaxDim * kMaxDim];
  for (std::size_t pt = 0; pt < grid.size(); ++pt) {
    ghat.inverse_matrix(pt, gi);
    const ProductPoint P(pdim, n, sigma, f[pt], gi, ghat.sqrt_det()[pt]);
    const Mask fib = P.fiber();
    std::map<Mask, double> Fb, Fp;
    for (int a = 0; a < beta.channels(); ++a) Fb[fib | (basis.mask(beta.degree(), a) << pdim)] = beta.channel(a)[pt];
    for (int a = 0; a < psi.channels(); ++a) Fp[basis.mask(psi.degree(), a) << pdim] = psi.channel(a)[pt];

    if (!beta.empty()) {
      std::map<Mask, double> expect;
      const double s = -sigma * std::exp(-c * f[pt]);
      for (int a = 0; a < star_b.channels(); ++a)
        expect[basis.mask(star_b.degree(), a) << pdim] = s * star_b.channel(a)[pt];
      rep.star_beta = std::max(rep.star_beta, compare(P.star(Fb), expect));
    }
    if (!psi.empty()) {
      std::map<Mask, double> expect;
      const double s = ((psi.degree() * pdim) % 2 ? -1.0 : 1.0) * std::exp(c * f[pt]);
      for (int a = 0; a < star_p.channels(); ++a)
        expect[fib | (basis.mask(star_p.degree(), a) << pdim)] = s * star_p.channel(a)[pt];
      rep.star_psi = std::max(rep.star_psi, compare(P.star(Fp), expect));
    }

    std::map<Mask, double> F = Fb;
    for (const auto& [m, v] : Fp) F[m] += v;
    const double wb = std::exp(-pdim * f[pt]);
    const double bnorm = beta.empty() ? 0.0 : sq_b.normsq[pt];
    const double pnorm = psi.empty() ? 0.0 : sq_p.normsq[pt];
    rep.normsq = std::max(rep.normsq, std::abs(P.inner(F, F) - (pnorm - sigma * wb * bnorm)));

    const int D = P.dim();
    std::vector<std::map<Mask, double>> iF(D);
    for (int a = 0; a < D; ++a) iF[a] = P.contract(a, F);
    for (int a = 0; a < D; ++a) {
      for (int b = a; b < D; ++b) {
        const double dense = P.inner(iF[a], iF[b]);
        double expect = 0.0;
        if (a < pdim && b < pdim) {
          const double gt = (a != b) ? 0.0 : ((a == 0 && sigma == 1) ? -1.0 : 1.0);
          expect = -sigma * std::exp(-p * f[pt]) * bnorm * gt;
          rep.square_ab = std::max(rep.square_ab, std::abs(dense - expect));
        } else if (a >= pdim && b >= pdim) {
          const int i = a - pdim, j = b - pdim;
          const double bb = beta.empty() ? 0.0 : sq_b.sq.at(i, j, pt);
          const double pp = psi.empty() ? 0.0 : sq_p.sq.at(i, j, pt);
          expect = pp - sigma * wb * bb;
          rep.square_ij = std::max(rep.square_ij, std::abs(dense - expect));
        } else {
          rep.square_mixed = std::max(rep.square_mixed, std::abs(dense));
        }
      }
    }
  }
  return rep;
}

}  // namespace sgflow
