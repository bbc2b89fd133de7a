#pragma once

#include "sgflow/fields.hpp"

namespace sgflow {

/// Pointwise a ∧ b. A total degree above n yields the empty zero form of that
/// degree.
DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);

/// Sign multiplying the Riemannian star on degree k in dimension n under
/// signature flag sigma: 1 below the middle degree, -sigma above it.
int star_sign(int n, int k, int sigma);

/// Riemannian Hodge star: a ∧ ⋆b = <a, b> dvol_g.
DifferentialForm hodge_star(const MetricField& g, const DifferentialForm& a);
/// Star with signature flag: ⋆1 = dvol_g, ⋆dvol_g = -sigma.
DifferentialForm hodge_star(const MetricField& g, int sigma, const DifferentialForm& a);

/// Centered periodic exterior derivative. d∘d = 0 exactly.
DifferentialForm exterior_derivative(const DifferentialForm& a);

/// Formal adjoint of d on the grid factor. It does not depend on sigma
/// because the grid metric is always Riemannian; the overload taking sigma
/// exists for call-site symmetry.
DifferentialForm codifferential(const MetricField& g, const DifferentialForm& a);
DifferentialForm codifferential(const MetricField& g, int sigma, const DifferentialForm& a);

/// dd† + d†d.
DifferentialForm hodge_laplacian(const MetricField& g, const DifferentialForm& a);
DifferentialForm hodge_laplacian(const MetricField& g, int sigma, const DifferentialForm& a);

struct FormSquare {
  SymTensorField sq;  ///< F²_ij = <ι_i F, ι_j F>
  ScalarField normsq;  ///< |F|²
};

FormSquare form_square(const MetricField& g, const DifferentialForm& F);
ScalarField norm_squared(const MetricField& g, const DifferentialForm& F);
/// Pointwise <a, b>_g.
ScalarField pointwise_inner(const MetricField& g, const DifferentialForm& a, const DifferentialForm& b);
/// Sum over the grid of <a, b>_g sqrt(det g) times the cell volume.
double inner_product(const MetricField& g, const DifferentialForm& a, const DifferentialForm& b);

/// ι_V a.
DifferentialForm interior(const VectorField& V, const DifferentialForm& a);
/// L_V a = d ι_V a + ι_V d a.
DifferentialForm lie_derivative(const VectorField& V, const DifferentialForm& a);

/// Sup over points of the pointwise norm |a|_g.
double sup_pointwise_norm(const MetricField& g, const DifferentialForm& a);

/// Metric-contracted Λ^k inner products: G_k[I][J] = det(ginv[I, J]) at one
/// point. `ginv` is dense n x n row-major; `out` is C(n,k)^2 row-major.
void compound_inverse(const double* ginv, int n, int k, double* out);

}  // namespace sgflow
