#include "sgflow/lorentzian.hpp"

#include <cmath>
#include <string>

#include "sgflow/error.hpp"

namespace sgflow {

LorentzianAlgebraForm::LorentzianAlgebraForm(int dim, int degree)
    : LorentzianAlgebraForm(dim, degree, std::vector<double>(binomial(dim, degree), 0.0)) {}

LorentzianAlgebraForm::LorentzianAlgebraForm(int dim, int degree, std::vector<double> coefficients)
    : dim_(dim), degree_(degree), coeff_(std::move(coefficients)) {
  if (dim < 1 || dim > 11) throw ShapeError("LorentzianAlgebraForm: dimension must be in 1..11");
  if (degree < 0 || degree > dim) throw ShapeError("LorentzianAlgebraForm: degree out of range");
  if (static_cast<int>(coeff_.size()) != binomial(dim, degree)) {
    throw ShapeError("LorentzianAlgebraForm: expected " + std::to_string(binomial(dim, degree)) + " coefficients");
  }
}

LorentzianAlgebraForm LorentzianAlgebraForm::volume(int dim, double value) {
  return LorentzianAlgebraForm(dim, dim, {value});
}

std::vector<double> LorentzianAlgebraForm::square() const {
  const int d = dim_;
  std::vector<double> sq(static_cast<std::size_t>(d) * d, 0.0);
  if (degree_ == 0) return sq;
  const auto& basis = ExteriorBasis::get(d);
  // α_{aA} for every increasing (j-1)-index A not containing a.
  for (Mask ma : basis.masks(degree_ - 1)) {
    double eta = 1.0;
    if (ma & 1u) eta = -1.0;
    for (int a = 0; a < d; ++a) {
      if (ma & (Mask{1} << a)) continue;
      const Mask mia = ma | (Mask{1} << a);
      const double va = merge_sign(Mask{1} << a, ma) * coeff_[basis.index(mia)];
      if (va == 0.0) continue;
      for (int b = 0; b < d; ++b) {
        if (ma & (Mask{1} << b)) continue;
        const Mask mib = ma | (Mask{1} << b);
        sq[a * d + b] += eta * va * merge_sign(Mask{1} << b, ma) * coeff_[basis.index(mib)];
      }
    }
  }
  return sq;
}

ConformalVerdict proposition1_check(int gdim, const LorentzianAlgebraForm& alpha, double tol) {
  if (alpha.dim() != gdim) throw ShapeError("proposition1_check: form dimension differs from factor dimension");
  const int d = gdim;
  const std::vector<double> sq = alpha.square();
  ConformalVerdict v;
  v.c = sq[0] / LorentzianAlgebraForm::metric(0);
  v.conformal = true;
  for (int a = 0; a < d && v.conformal; ++a) {
    for (int b = 0; b < d; ++b) {
      const double target = a == b ? v.c * LorentzianAlgebraForm::metric(a) : 0.0;
      if (std::abs(sq[a * d + b] - target) > tol) {
        v.conformal = false;
        break;
      }
    }
  }
  bool nonzero = false;
  for (double x : alpha.coefficients()) nonzero = nonzero || x != 0.0;
  v.forced_trivial = v.conformal && alpha.degree() > 0 && alpha.degree() < d && nonzero;
  return v;
}

}  // namespace sgflow
