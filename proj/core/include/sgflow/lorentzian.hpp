#pragma once

#include <vector>

#include "sgflow/exterior.hpp"

namespace sgflow {

/// Constant j-form on a single Lorentzian vector space of dimension d with
/// metric diag(-1, 1, ..., 1). Coefficients follow ExteriorBasis order.
class LorentzianAlgebraForm {
 public:
  LorentzianAlgebraForm(int dim, int degree);
  LorentzianAlgebraForm(int dim, int degree, std::vector<double> coefficients);
  static LorentzianAlgebraForm volume(int dim, double value = 1.0);

  int dim() const noexcept { return dim_; }
  int degree() const noexcept { return degree_; }
  std::vector<double>& coefficients() noexcept { return coeff_; }
  const std::vector<double>& coefficients() const noexcept { return coeff_; }

  /// α²_ab = 1/(j-1)! α_{a c...} α_b^{c...}, dense d x d row-major.
  std::vector<double> square() const;
  static double metric(int a) { return a == 0 ? -1.0 : 1.0; }

 private:
  int dim_;
  int degree_;
  std::vector<double> coeff_;
};

struct ConformalVerdict {
  bool conformal = false;
  double c = 0.0;
  bool forced_trivial = false;
};

/// Checks whether α² is proportional to the metric (constant read off the
/// 00 entry). A nonzero conformal form of intermediate degree would be a
/// counterexample and is reported as forced_trivial.
ConformalVerdict proposition1_check(int gdim, const LorentzianAlgebraForm& alpha, double tol = 1e-10);

}  // namespace sgflow
