#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sgflow/forms.hpp"
#include "sgflow/geometry.hpp"
#include "test_util.hpp"

using namespace sgflow;
using fixtures::kTwoPi;

namespace {

MetricField conformal_2d(int N, double amp) {
  const GridSpec grid = GridSpec::cube(2, N);
  const ScalarField u = fixtures::sample(grid, [&](const double* x) {
    return amp * std::sin(kTwoPi * x[0]) * std::sin(kTwoPi * x[1]);
  });
  SymTensorField t(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) t.component(0, 0)[p] = t.component(1, 1)[p] = std::exp(2 * u[p]);
  return MetricField(t);
}

// K = -e^{-2u} Δu for u = a sin(2πx) sin(2πy).
double gaussian_curvature_error(int N) {
  const double amp = 0.1;
  const MetricField g = conformal_2d(N, amp);
  const CurvatureBundle cb = curvature_suite(g);
  double err = 0.0;
  for (std::size_t p = 0; p < g.points(); ++p) {
    const double x = g.grid().coordinate(p, 0), y = g.grid().coordinate(p, 1);
    const double u = amp * std::sin(kTwoPi * x) * std::sin(kTwoPi * y);
    const double K = std::exp(-2 * u) * 2 * kTwoPi * kTwoPi * u;
    err = std::max(err, std::abs(0.5 * cb.scalar[p] - K));
  }
  return err;
}

}  // namespace

TEST(Curvature, FlatIsZero) {
  for (int n = 1; n <= 4; ++n) {
    const MetricField g = MetricField::flat(GridSpec::cube(n, 6), 2.0);
    const CurvatureBundle cb = curvature_suite(g);
    EXPECT_LE(cb.riemann.sup_norm(), 1e-12);
    EXPECT_LE(cb.ricci.sup_norm(), 1e-12);
    EXPECT_LE(cb.norm_rm.sup_norm(), 1e-12);
  }
}

TEST(Curvature, ConstantNonDiagonalMetricIsFlat) {
  const GridSpec grid = GridSpec::cube(3, 6);
  SymTensorField t = SymTensorField::identity(grid, 1.5);
  std::fill_n(t.component(0, 2), grid.size(), 0.3);
  const CurvatureBundle cb = curvature_suite(MetricField(t));
  EXPECT_LE(cb.norm_rm.sup_norm(), 1e-12);
}

TEST(Curvature, ConformalGaussianCurvatureSecondOrder) {
  const double e1 = gaussian_curvature_error(16);
  const double e2 = gaussian_curvature_error(32);
  const double e3 = gaussian_curvature_error(64);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.2);
  EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.2);
}

TEST(Curvature, TwoDimensionalRiemannMatchesGaussCurvature) {
  const MetricField g = conformal_2d(32, 0.1);
  const CurvatureBundle cb = curvature_suite(g);
  // In 2D R_0101 = K det g and Ric = K g.
  for (std::size_t p = 0; p < g.points(); ++p) {
    const double K = 0.5 * cb.scalar[p];
    const double det = g.sqrt_det()[p] * g.sqrt_det()[p];
    EXPECT_NEAR(cb.riemann.channel(0)[p], K * det, 1e-10 * (1 + std::abs(K)));
    EXPECT_NEAR(cb.ricci.at(0, 0, p), K * g.g(0, 0, p), 1e-10 * (1 + std::abs(K)));
  }
}

TEST(Curvature, AlgebraicSymmetries) {
  const GridSpec grid = GridSpec::cube(3, 12);
  const MetricField g = fixtures::smooth_metric(grid, 0.2);
  const CurvatureBundle cb = curvature_suite(g);
  const auto& basis = ExteriorBasis::get(3);
  const int c2 = basis.count(2);
  const double scale = cb.riemann.sup_norm();
  ASSERT_GT(scale, 0.0);
  auto R = [&](int i, int j, int k, int l, std::size_t p) {
    if (i == j || k == l) return 0.0;
    double s = 1.0;
    if (i > j) std::swap(i, j), s = -s;
    if (k > l) std::swap(k, l), s = -s;
    const int a = basis.index((Mask{1} << i) | (Mask{1} << j));
    const int b = basis.index((Mask{1} << k) | (Mask{1} << l));
    return s * cb.riemann.channel(a * c2 + b)[p];
  };
  double pair = 0.0, bianchi = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            pair = std::max(pair, std::abs(R(i, j, k, l, p) - R(k, l, i, j, p)));
            bianchi = std::max(bianchi, std::abs(R(i, j, k, l, p) + R(i, k, l, j, p) + R(i, l, j, k, p)));
          }
  EXPECT_LE(pair, 1e-10 * scale);
  EXPECT_LE(bianchi, 1e-10 * scale);
  // Ricci symmetric by storage; scalar is its trace.
  const ScalarField tr = trace(g, cb.ricci);
  for (std::size_t p = 0; p < grid.size(); ++p) EXPECT_NEAR(tr[p], cb.scalar[p], 1e-12);
}

TEST(Curvature, NormMatchesFullContraction) {
  const GridSpec grid = GridSpec::cube(2, 16);
  const MetricField g = conformal_2d(16, 0.1);
  const CurvatureBundle cb = curvature_suite(g);
  // |Rm|² = 4 R_0101² / det² in 2D = 4K².
  for (std::size_t p = 0; p < g.points(); ++p) {
    const double K = cb.riemann.channel(0)[p] / (g.sqrt_det()[p] * g.sqrt_det()[p]);
    EXPECT_NEAR(cb.norm_rm[p] * cb.norm_rm[p], 4 * K * K, 1e-9 * (1 + K * K));
  }
}

TEST(Curvature, ProductMetricIsBlockDiagonal) {
  const int N = 12;
  const GridSpec grid = GridSpec::cube(4, N);
  const GridSpec g2 = GridSpec::cube(2, N);
  SymTensorField t(grid);
  auto u1 = [](double x, double y) { return 0.1 * std::sin(kTwoPi * x) * std::cos(kTwoPi * y); };
  auto u2 = [](double x, double y) { return 0.15 * std::cos(kTwoPi * (x + y)); };
  for (std::size_t p = 0; p < grid.size(); ++p) {
    double x[4];
    for (int a = 0; a < 4; ++a) x[a] = grid.coordinate(p, a);
    t.component(0, 0)[p] = t.component(1, 1)[p] = std::exp(2 * u1(x[0], x[1]));
    t.component(0, 1)[p] = 0.1 * std::sin(kTwoPi * x[1]);
    t.component(2, 2)[p] = t.component(3, 3)[p] = std::exp(2 * u2(x[2], x[3]));
  }
  const SymTensorField ric = ricci(MetricField(t));
  double cross = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 2; j < 4; ++j)
      for (std::size_t p = 0; p < grid.size(); ++p) cross = std::max(cross, std::abs(ric.at(i, j, p)));
  EXPECT_LE(cross, 1e-10);

  SymTensorField a(g2), b(g2);
  for (std::size_t p = 0; p < g2.size(); ++p) {
    const double x = g2.coordinate(p, 0), y = g2.coordinate(p, 1);
    a.component(0, 0)[p] = a.component(1, 1)[p] = std::exp(2 * u1(x, y));
    a.component(0, 1)[p] = 0.1 * std::sin(kTwoPi * y);
    b.component(0, 0)[p] = b.component(1, 1)[p] = std::exp(2 * u2(x, y));
  }
  const SymTensorField ra = ricci(MetricField(a));
  const SymTensorField rb = ricci(MetricField(b));
  double err = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const std::size_t pa = grid.axis_index(p, 0) * N + grid.axis_index(p, 1);
    const std::size_t pb = grid.axis_index(p, 2) * N + grid.axis_index(p, 3);
    for (int i = 0; i < 2; ++i)
      for (int j = i; j < 2; ++j) {
        err = std::max(err, std::abs(ric.at(i, j, p) - ra.at(i, j, pa)));
        err = std::max(err, std::abs(ric.at(i + 2, j + 2, p) - rb.at(i, j, pb)));
      }
  }
  EXPECT_LE(err, 1e-10);
}

TEST(Hessian, ConstantIsZero) {
  const GridSpec grid = GridSpec::cube(3, 8);
  const Hessian h = hessian_and_laplacian(fixtures::smooth_metric(grid), ScalarField(grid, 4.0));
  EXPECT_EQ(h.hess.sup_norm(), 0.0);
  EXPECT_EQ(h.lap.sup_norm(), 0.0);
  EXPECT_EQ(h.gradsq.sup_norm(), 0.0);
}

TEST(Hessian, FlatEigenfunction) {
  const double L = 2.0;
  double prev = 0.0;
  for (int N : {16, 32, 64}) {
    const GridSpec grid({N, N}, {L, L});
    const ScalarField f = fixtures::sample(grid, [&](const double* x) { return std::sin(kTwoPi * x[0] / L); });
    const Hessian h = hessian_and_laplacian(MetricField::flat(grid), f);
    double err = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p) err = std::max(err, std::abs(h.lap[p] + std::pow(kTwoPi / L, 2) * f[p]));
    if (prev > 0.0) EXPECT_NEAR(std::log2(prev / err), 2.0, 0.1);
    prev = err;
  }
}

TEST(Hessian, FlatLaplacianIsFivePointStencil) {
  std::mt19937_64 rng(3);
  const GridSpec grid = GridSpec::cube(2, 8);
  const ScalarField f = fixtures::random_scalar(grid, rng);
  const Hessian h = hessian_and_laplacian(MetricField::flat(grid), f);
  const double inv = 1.0 / (grid.spacing(0) * grid.spacing(0));
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      auto at = [&](int a, int b) { return f[((a + 8) % 8) * 8 + (b + 8) % 8]; };
      const double five = (at(i + 1, j) + at(i - 1, j) + at(i, j + 1) + at(i, j - 1) - 4 * at(i, j)) * inv;
      EXPECT_NEAR(h.lap[i * 8 + j], five, 1e-12 * inv);
    }
}

TEST(Hessian, TraceIsLaplacian) {
  std::mt19937_64 rng(5);
  const GridSpec grid = GridSpec::cube(3, 8);
  const MetricField g = fixtures::smooth_metric(grid, 0.3);
  const Hessian h = hessian_and_laplacian(g, fixtures::random_scalar(grid, rng));
  const ScalarField tr = trace(g, h.hess);
  for (std::size_t p = 0; p < grid.size(); ++p) EXPECT_LE(std::abs(tr[p] - h.lap[p]), 1e-12);
}

TEST(WarpedBlocks, UnwarpedProduct) {
  const GridSpec grid = GridSpec::cube(3, 6);
  const EinsteinFactor factor{4, 1, -1.0};
  const WarpedBlocks w = warped_block_curvature(factor, ScalarField(grid, 0.7), MetricField::flat(grid));
  for (std::size_t p = 0; p < grid.size(); ++p) EXPECT_EQ(w.ric_ab_coeff[p], -1.0);
  EXPECT_EQ(w.ric_ij.sup_norm(), 0.0);
}

TEST(WarpedBlocks, OneVariableProfile) {
  // λ̃ = 0, flat base, f = a sin(2πx): Ric_ab = -½e^f(f'' + c f'²), Ric_xx = -c(f'' + ½f'²).
  const EinsteinFactor factor{7, 1, 0.0};
  const double c = factor.c(), a = 0.3;
  double prev = 0.0;
  for (int N : {16, 32, 64}) {
    const GridSpec grid({N, 4, 4}, {1.0, 1.0, 1.0});
    const ScalarField f = fixtures::sample(grid, [&](const double* x) { return a * std::sin(kTwoPi * x[0]); });
    const WarpedBlocks w = warped_block_curvature(factor, f, MetricField::flat(grid));
    double err = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const double x = grid.coordinate(p, 0);
      const double f1 = a * kTwoPi * std::cos(kTwoPi * x);
      const double f2 = -a * kTwoPi * kTwoPi * std::sin(kTwoPi * x);
      err = std::max(err, std::abs(w.ric_ab_coeff[p] + 0.5 * std::exp(f[p]) * (f2 + c * f1 * f1)));
      err = std::max(err, std::abs(w.ric_ij.at(0, 0, p) + c * (f2 + 0.5 * f1 * f1)));
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
          if (i + j > 0) err = std::max(err, std::abs(w.ric_ij.at(i, j, p)));
    }
    if (prev > 0.0) EXPECT_NEAR(std::log2(prev / err), 2.0, 0.2);
    prev = err;
  }
}

TEST(WarpedBlocks, AssemblyIdentity) {
  const GridSpec grid = GridSpec::cube(3, 10);
  const MetricField g = fixtures::smooth_metric(grid, 0.2);
  const ScalarField f = fixtures::sample(grid, [](const double* x) { return 0.2 * std::cos(kTwoPi * (x[0] - x[2])); });
  const EinsteinFactor factor{8, -1, 1.0};
  const WarpedBlocks w = warped_block_curvature(factor, f, g);
  const Hessian h = hessian_and_laplacian(g, f);
  const SymTensorField ric = ricci(g);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      for (std::size_t p = 0; p < grid.size(); ++p) {
        const double r = w.ric_ij.at(i, j, p) +
                         factor.c() * (h.hess.at(i, j, p) + 0.5 * h.df.component(i)[p] * h.df.component(j)[p]) -
                         ric.at(i, j, p);
        EXPECT_LE(std::abs(r), 1e-12);
      }
}

TEST(WarpedBlocks, ExponentialFormAgreesToSecondOrder) {
  const EinsteinFactor factor{4, 1, 1.0};
  double prev = 0.0;
  for (int N : {16, 32, 64}) {
    const GridSpec grid = GridSpec::cube(2, N);
    const MetricField g = fixtures::smooth_metric(grid, 0.2);
    const ScalarField f = fixtures::sample(grid, [](const double* x) { return 0.3 * std::sin(kTwoPi * x[0]) * std::cos(kTwoPi * x[1]); });
    const WarpedBlocks a = warped_block_curvature(factor, f, g);
    const WarpedBlocks b = warped_block_curvature_exp(factor, f, g);
    a.ric_ab_coeff.sup_norm();
    ScalarField d1 = a.ric_ab_coeff;
    d1 -= b.ric_ab_coeff;
    SymTensorField d2 = a.ric_ij;
    d2 -= b.ric_ij;
    const double err = std::max(d1.sup_norm(), d2.sup_norm());
    if (prev > 0.0) EXPECT_NEAR(std::log2(prev / err), 2.0, 0.2);
    prev = err;
  }
}

TEST(WarpedStar, ZeroForms) {
  const GridSpec grid = GridSpec::cube(4, 4);
  const EinsteinFactor factor{7, 1, -1.0};
  const WarpedStarReport r = warped_hodge_star_identities(factor, ScalarField(grid, 0.3), MetricField::flat(grid),
                                                          DifferentialForm(grid, 3 - 6), DifferentialForm(grid, 4));
  EXPECT_EQ(r.max(), 0.0);
}

TEST(WarpedStar, ConstantInputsAllSignatures) {
  std::mt19937_64 rng(41);
  for (int p : {0, 1, 2, 3, 6, 7}) {
    const int n = 10 - p;
    const GridSpec grid = GridSpec::homogeneous(n);
    for (int sigma : {1, -1}) {
      SymTensorField t = SymTensorField::identity(grid, 1.2);
      for (int i = 0; i + 1 < n; ++i) t.component(i, i + 1)[0] = 0.2;
      const MetricField g(t);
      const EinsteinFactor factor{p + 1, sigma, 1.0};
      const DifferentialForm beta = fixtures::random_form(grid, 3 - p, rng);
      const DifferentialForm psi = fixtures::random_form(grid, 4, rng);
      const WarpedStarReport r = warped_hodge_star_identities(factor, ScalarField(grid, -0.4), g, beta, psi);
      const double scale = 1.0 + norm_squared(g, beta).max() + norm_squared(g, psi).max();
      const double others = std::max({r.star_beta, r.star_psi, r.square_ab, r.square_ij, r.normsq});
      EXPECT_LE(others, 1e-13 * scale) << "p=" << p << " sigma=" << sigma;
      if (p == 0) {
        // With a one-dimensional factor ι_a(dvol∧β) = β pairs with ι_iΨ, so
        // the mixed block of F² is <β, ι_iΨ> and does not vanish in general.
        EXPECT_GT(r.square_mixed, 1e-3);
        const WarpedStarReport rb = warped_hodge_star_identities(factor, ScalarField(grid, -0.4), g, beta,
                                                                 DifferentialForm(grid, 4));
        EXPECT_LE(rb.max(), 1e-13 * scale);
      } else {
        EXPECT_LE(r.square_mixed, 1e-13 * scale) << "p=" << p;
      }
    }
  }
}

TEST(WarpedStar, SmoothInputs) {
  const GridSpec grid = GridSpec::cube(4, 4);
  const MetricField g = fixtures::smooth_metric(grid, 0.2);
  const ScalarField f = fixtures::sample(grid, [](const double* x) { return 0.4 * std::sin(kTwoPi * x[1]); });
  std::mt19937_64 rng(43);
  const DifferentialForm psi = fixtures::random_form(grid, 4, rng);
  const WarpedStarReport r = warped_hodge_star_identities(EinsteinFactor{7, 1, -1.0}, f, g, DifferentialForm(grid, -3), psi);
  EXPECT_LE(r.max(), 1e-12);
}
