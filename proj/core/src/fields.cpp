#include "sgflow/fields.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <bit>
#include <mutex>
#include <cmath>
#include <limits>
#include <string>

#include "sgflow/error.hpp"
#include "sgflow/forms.hpp"

namespace sgflow {

using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

GridData::GridData(const GridSpec& grid, int channels, double fill)
    : grid_(grid), channels_(channels), data_(static_cast<std::size_t>(channels) * grid.size(), fill) {}

double GridData::sup_norm() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool GridData::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void GridData::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void GridData::scale(double a) {
  for (double& v : data_) v *= a;
}

void GridData::axpy(double a, const GridData& x) {
  require_compatible(x, "axpy");
  const double* src = x.data_.data();
  double* dst = data_.data();
  const std::size_t m = data_.size();
  for (std::size_t i = 0; i < m; ++i) dst[i] += a * src[i];
}

void GridData::require_compatible(const GridData& other, const char* where) const {
  require_same_grid(grid_, other.grid_, where);
  if (channels_ != other.channels_) throw ShapeError(std::string(where) + ": channel count mismatch");
}

ScalarField::ScalarField(const GridSpec& grid, double value) : GridData(grid, 1, value) {}

ScalarField::ScalarField(const GridSpec& grid, std::vector<double> values) : GridData(grid, 1) {
  if (values.size() != grid.size()) throw ShapeError("ScalarField: value count does not match grid");
  data_ = std::move(values);
  if (!all_finite()) throw ShapeError("ScalarField: non-finite value");
}

double ScalarField::max() const { return *std::max_element(data_.begin(), data_.end()); }
double ScalarField::min() const { return *std::min_element(data_.begin(), data_.end()); }

SymTensorField SymTensorField::identity(const GridSpec& grid, double a) {
  SymTensorField t(grid);
  for (int i = 0; i < grid.dim(); ++i) std::fill_n(t.component(i, i), grid.size(), a);
  return t;
}

DifferentialForm::DifferentialForm(const GridSpec& grid, int degree)
    : GridData(grid, binomial(grid.dim(), degree)), degree_(degree) {}

double DifferentialForm::value(const int* idx, std::size_t p) const {
  Mask m = 0;
  int inversions = 0;
  for (int a = 0; a < degree_; ++a) {
    const Mask bit = Mask{1} << idx[a];
    if (m & bit) return 0.0;
    inversions += popcount(m >> (idx[a] + 1));
    m |= bit;
  }
  const double v = component(m)[p];
  return (inversions & 1) ? -v : v;
}

DifferentialForm DifferentialForm::basis_form(const GridSpec& grid, Mask m, double value) {
  DifferentialForm f(grid, popcount(m));
  std::fill_n(f.component(m), grid.size(), value);
  return f;
}

DifferentialForm& DifferentialForm::operator+=(const DifferentialForm& o) {
  if (o.degree_ != degree_) throw ShapeError("form addition: degree mismatch");
  axpy(1.0, o);
  return *this;
}

DifferentialForm& DifferentialForm::operator-=(const DifferentialForm& o) {
  if (o.degree_ != degree_) throw ShapeError("form subtraction: degree mismatch");
  axpy(-1.0, o);
  return *this;
}

DifferentialForm operator+(DifferentialForm a, const DifferentialForm& b) { return a += b; }
DifferentialForm operator-(DifferentialForm a, const DifferentialForm& b) { return a -= b; }
DifferentialForm operator*(double s, DifferentialForm a) { return a *= s; }

namespace {

// Cholesky of g - eps I as the definiteness check, then of g for the inverse
// and sqrt(det g) = prod L_ii.
template <int N>
void factor_points(const double* const* src, double* const* dst, double* sqrtdet, std::size_t count, double eps) {
  using Mat = Eigen::Matrix<double, N, N>;
  Mat a;
  Eigen::LLT<Mat> llt;
  for (std::size_t p = 0; p < count; ++p) {
    for (int i = 0; i < N; ++i) {
      for (int j = i; j < N; ++j) {
        const double v = src[SymTensorField::index(N, i, j)][p];
        if (!std::isfinite(v)) {
          throw DegenerateMetricError("metric has a non-finite entry at point " + std::to_string(p), p);
        }
        a(i, j) = a(j, i) = v;
      }
    }
    llt.compute(a - eps * Mat::Identity());
    if (llt.info() != Eigen::Success) {
      throw DegenerateMetricError("metric is not positive definite (smallest eigenvalue below " +
                                      std::to_string(eps) + ") at point " + std::to_string(p),
                                  p);
    }
    llt.compute(a);
    const Mat& l = llt.matrixLLT();
    Mat linv = Mat::Zero();
    double root = 1.0;
    for (int j = 0; j < N; ++j) {
      root *= l(j, j);
      linv(j, j) = 1.0 / l(j, j);
      for (int i = j + 1; i < N; ++i) {
        double acc = 0.0;
        for (int k = j; k < i; ++k) acc += l(i, k) * linv(k, j);
        linv(i, j) = -acc / l(i, i);
      }
    }
    sqrtdet[p] = root;
    for (int i = 0; i < N; ++i) {
      for (int j = i; j < N; ++j) {
        double acc = 0.0;
        for (int k = j; k < N; ++k) acc += linv(k, i) * linv(k, j);
        dst[SymTensorField::index(N, i, j)][p] = acc;
      }
    }
  }
}

}  // namespace

MetricField::MetricField(SymTensorField entries, double eps_pd)
    : cache_(std::make_shared<CompoundCache>()),
      g_(std::move(entries)),
      ginv_(g_.grid()),
      sqrtdet_(g_.grid()),
      eps_pd_(eps_pd) {
  const int n = g_.dim();
  const std::size_t np = g_.points();
  const int nc = g_.channels();
  std::vector<const double*> src(nc);
  std::vector<double*> dst(nc);
  for (int c = 0; c < nc; ++c) {
    src[c] = g_.channel(c);
    dst[c] = ginv_.channel(c);
  }
  uniform_ = true;
  for (int c = 0; c < nc && uniform_; ++c) {
    uniform_ = std::all_of(src[c], src[c] + np, [v = src[c][0]](double x) { return x == v; });
  }
  const std::size_t ncompute = uniform_ ? 1 : np;
  switch (n) {
    case 0: sqrtdet_.fill(1.0); break;
    case 1: factor_points<1>(src.data(), dst.data(), sqrtdet_.data(), ncompute, eps_pd_); break;
    case 2: factor_points<2>(src.data(), dst.data(), sqrtdet_.data(), ncompute, eps_pd_); break;
    case 3: factor_points<3>(src.data(), dst.data(), sqrtdet_.data(), ncompute, eps_pd_); break;
    case 4: factor_points<4>(src.data(), dst.data(), sqrtdet_.data(), ncompute, eps_pd_); break;
    case 5: factor_points<5>(src.data(), dst.data(), sqrtdet_.data(), ncompute, eps_pd_); break;
    case 6: factor_points<6>(src.data(), dst.data(), sqrtdet_.data(), ncompute, eps_pd_); break;
    case 7: factor_points<7>(src.data(), dst.data(), sqrtdet_.data(), ncompute, eps_pd_); break;
    case 8: factor_points<8>(src.data(), dst.data(), sqrtdet_.data(), ncompute, eps_pd_); break;
    case 9: factor_points<9>(src.data(), dst.data(), sqrtdet_.data(), ncompute, eps_pd_); break;
    default: factor_points<10>(src.data(), dst.data(), sqrtdet_.data(), ncompute, eps_pd_); break;
  }
  if (uniform_) {
    for (int c = 0; c < nc; ++c) std::fill(dst[c] + 1, dst[c] + np, dst[c][0]);
    std::fill(sqrtdet_.data() + 1, sqrtdet_.data() + np, sqrtdet_[0]);
  }
}

struct MetricField::CompoundCache {
  std::array<std::once_flag, kMaxDim + 1> once;
  std::array<std::vector<double>, kMaxDim + 1> tables;
};

const double* MetricField::compound_table(int k) const {
  const int n = dim();
  if (!cache_ || k < 0 || k > n) return nullptr;
  constexpr std::size_t kBudget = std::size_t{1} << 22;
  const std::size_t c = static_cast<std::size_t>(binomial(n, k));
  const std::size_t np = uniform_ ? 1 : points();
  if (c * c * np > kBudget) return nullptr;
  std::call_once(cache_->once[k], [&] {
    std::vector<double>& t = cache_->tables[k];
    t.resize(c * c * np);
    if (k >= 1 && k >= n - 1) {
      // Jacobi: minors of g^{-1} of size n-1 are signed entries of g over det g.
      const ExteriorBasis& basis = ExteriorBasis::get(n);
      const Mask full = (Mask{1} << n) - 1;
      std::vector<int> missing(c);
      for (std::size_t a = 0; a < c; ++a) missing[a] = std::countr_zero(full & ~basis.mask(k, static_cast<int>(a)));
      for (std::size_t p = 0; p < np; ++p) {
        const double det_inv = 1.0 / (sqrtdet_[p] * sqrtdet_[p]);
        double* out = t.data() + p * c * c;
        if (k == n) {
          out[0] = det_inv;
          continue;
        }
        for (std::size_t a = 0; a < c; ++a) {
          for (std::size_t b = a; b < c; ++b) {
            const int i = missing[a], j = missing[b];
            const double v = ((i + j) & 1 ? -det_inv : det_inv) * g_.at(i, j, p);
            out[a * c + b] = out[b * c + a] = v;
          }
        }
      }
      return;
    }
    double buf[kMaxDim * kMaxDim];
    for (std::size_t p = 0; p < np; ++p) {
      inverse_matrix(p, buf);
      compound_inverse(buf, n, k, t.data() + p * c * c);
    }
  });
  return cache_->tables[k].data();
}

MetricField MetricField::flat(const GridSpec& grid, double scale) {
  return MetricField(SymTensorField::identity(grid, scale));
}

void MetricField::matrix(std::size_t p, double* out) const {
  const int n = dim();
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) out[i * n + j] = out[j * n + i] = g_.at(i, j, p);
  }
}

void MetricField::inverse_matrix(std::size_t p, double* out) const {
  const int n = dim();
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) out[i * n + j] = out[j * n + i] = ginv_.at(i, j, p);
  }
}

double min_eigenvalue(const MetricField& g) {
  const int n = g.dim();
  const std::size_t np = g.uniform() ? 1 : g.points();
  double lo = std::numeric_limits<double>::infinity();
  SmallMatrix a(n, n);
  Eigen::SelfAdjointEigenSolver<SmallMatrix> es(n);
  double buf[kMaxDim * kMaxDim];
  for (std::size_t p = 0; p < np; ++p) {
    g.matrix(p, buf);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = buf[i * n + j];
    es.compute(a, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues()(0));
  }
  return lo;
}

double max_inverse_eigenvalue(const MetricField& g) { return 1.0 / min_eigenvalue(g); }

double integrate(const MetricField& g, const ScalarField& s) {
  require_same_grid(g.grid(), s.grid(), "integrate");
  const double* w = g.sqrt_det().data();
  double acc = 0.0;
  for (std::size_t p = 0; p < s.points(); ++p) acc += s[p] * w[p];
  return acc * g.grid().cell_volume();
}

ScalarField pointwise_product(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "pointwise_product");
  ScalarField out(a.grid());
  for (std::size_t p = 0; p < a.points(); ++p) out[p] = a[p] * b[p];
  return out;
}

DifferentialForm scale_form(const ScalarField& s, const DifferentialForm& a) {
  require_same_grid(s.grid(), a.grid(), "scale_form");
  DifferentialForm out(a.grid(), a.degree());
  const std::size_t np = a.points();
  for (int c = 0; c < a.channels(); ++c) {
    const double* src = a.channel(c);
    double* dst = out.channel(c);
    for (std::size_t p = 0; p < np; ++p) dst[p] = s[p] * src[p];
  }
  return out;
}

}  // namespace sgflow
