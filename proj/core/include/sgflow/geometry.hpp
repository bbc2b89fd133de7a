#pragma once

#include "sgflow/fields.hpp"
#include "sgflow/tensor.hpp"

namespace sgflow {

/// Γ^k_ij = ½ g^{kl}(∂_i g_lj + ∂_j g_li - ∂_l g_ij), centered differences.
ChristoffelField christoffels(const MetricField& g);

/// R_ij = ∂_k Γ^k_ij - ∂_j Γ^k_ik + Γ^k_kp Γ^p_ij - Γ^k_jp Γ^p_ik, symmetrized.
SymTensorField ricci(const MetricField& g, const ChristoffelField& gamma);
SymTensorField ricci(const MetricField& g);

ScalarField trace(const MetricField& g, const SymTensorField& t);

struct CurvatureBundle {
  ChristoffelField christoffels;
  /// R_lkij with slots {2, 2} and norm weight 4. Projected so that pair
  /// antisymmetry, pair exchange and the first Bianchi identity hold exactly.
  TensorField riemann;
  SymTensorField ricci;
  ScalarField scalar;
  ScalarField norm_rm;
};

CurvatureBundle curvature_suite(const MetricField& g);

/// Riemann tensor only (same projection as the bundle).
TensorField riemann_tensor(const MetricField& g, const ChristoffelField& gamma);

struct Hessian {
  SymTensorField hess;
  ScalarField lap;
  ScalarField gradsq;
  /// ∂_i f
  VectorField df;
};

/// hess_ij = ∂_i∂_j f - Γ^k_ij ∂_k f. Diagonal second derivatives use the
/// compact three-point stencil, mixed ones centered differences.
Hessian hessian_and_laplacian(const MetricField& g, const ChristoffelField& gamma, const ScalarField& f);
Hessian hessian_and_laplacian(const MetricField& g, const ScalarField& f);

/// Einstein factor g̃ of dimension p+1 with Ric(g̃) = λ̃ g̃. sigma = +1 marks a
/// Lorentzian factor, -1 a Riemannian one.
struct EinsteinFactor {
  int pdim = 1;
  int sigma = 1;
  double lambda = 0.0;

  int p() const noexcept { return pdim - 1; }
  /// (p+1)/2
  double c() const noexcept { return 0.5 * pdim; }
  void validate(bool allow_unnormalized = false) const;
};

struct WarpedBlocks {
  /// Ric(g)_ab = ric_ab_coeff * g̃_ab
  ScalarField ric_ab_coeff;
  SymTensorField ric_ij;
};

/// Ricci blocks of g = e^f g̃ + ĝ from the contracted warped-product formulas.
/// `base_ricci` overrides Ric(ĝ) when given.
WarpedBlocks warped_block_curvature(const EinsteinFactor& factor, const ScalarField& f, const MetricField& ghat,
                                    const SymTensorField* base_ricci = nullptr);

/// Same blocks written through u = e^{f/2}: Ric_ab = λ̃ - e^f e^{-cf}Δe^{cf}/(p+1),
/// Ric_ij = Ric(ĝ) - (p+1) e^{-f/2} ∇²e^{f/2}. Agrees with the form above in
/// the continuum and differs at O(h²) on the grid.
WarpedBlocks warped_block_curvature_exp(const EinsteinFactor& factor, const ScalarField& f, const MetricField& ghat,
                                        const SymTensorField* base_ricci = nullptr);

struct WarpedStarReport {
  double star_beta = 0.0;  ///< ⋆_g(dvol_g̃∧β) vs -σ e^{-cf} ⋆_ĝ β
  double star_psi = 0.0;  ///< ⋆_g Ψ vs e^{cf} dvol_g̃ ∧ ⋆_ĝ Ψ
  double square_ab = 0.0;  ///< F²_ab vs -σ e^{-pf}|β|² g̃_ab
  double square_ij = 0.0;  ///< F²_ij vs Ψ² - σ e^{-(p+1)f} β²
  double square_mixed = 0.0;  ///< F²_ai vs 0
  double normsq = 0.0;  ///< |F|² vs |Ψ|² - σ e^{-(p+1)f}|β|²
  double max() const;
};

/// Evaluates the warped-product identities for ⋆F, F² and |F|² by building
/// the full (p+1+n)-dimensional metric and form at every grid point (g̃ in
/// an orthonormal frame) and comparing against the block expressions.
WarpedStarReport warped_hodge_star_identities(const EinsteinFactor& factor, const ScalarField& f,
                                              const MetricField& ghat, const DifferentialForm& beta,
                                              const DifferentialForm& psi);

}  // namespace sgflow
