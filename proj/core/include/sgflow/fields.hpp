#pragma once

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "sgflow/exterior.hpp"
#include "sgflow/grid.hpp"

namespace sgflow {

/// Channel-major storage: `channels` arrays of grid.size() doubles each.
class GridData {
 public:
  GridData() = default;
  GridData(const GridSpec& grid, int channels, double fill = 0.0);

  const GridSpec& grid() const noexcept { return grid_; }
  int channels() const noexcept { return channels_; }
  std::size_t points() const noexcept { return grid_.size(); }
  bool empty() const noexcept { return channels_ == 0; }

  double* channel(int c) { return data_.data() + static_cast<std::size_t>(c) * points(); }
  const double* channel(int c) const { return data_.data() + static_cast<std::size_t>(c) * points(); }
  std::vector<double>& raw() noexcept { return data_; }
  const std::vector<double>& raw() const noexcept { return data_; }

  double sup_norm() const;
  bool all_finite() const;
  void fill(double v);
  void scale(double a);
  /// this += a * x
  void axpy(double a, const GridData& x);

 protected:
  void require_compatible(const GridData& other, const char* where) const;

  GridSpec grid_;
  int channels_ = 0;
  std::vector<double> data_;
};

class ScalarField : public GridData {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& grid, double value = 0.0);
  /// Rejects non-finite values.
  ScalarField(const GridSpec& grid, std::vector<double> values);

  double& operator[](std::size_t p) { return data_[p]; }
  double operator[](std::size_t p) const { return data_[p]; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double max() const;
  double min() const;

  ScalarField& operator+=(const ScalarField& o) { axpy(1.0, o); return *this; }
  ScalarField& operator-=(const ScalarField& o) { axpy(-1.0, o); return *this; }
  ScalarField& operator*=(double a) { scale(a); return *this; }
};

/// Components of a vector field V^i.
class VectorField : public GridData {
 public:
  VectorField() = default;
  explicit VectorField(const GridSpec& grid) : GridData(grid, grid.dim()) {}
  double* component(int i) { return channel(i); }
  const double* component(int i) const { return channel(i); }
};

/// Symmetric 2-tensor; channel (i, j) with i <= j in row-major upper order.
class SymTensorField : public GridData {
 public:
  SymTensorField() = default;
  explicit SymTensorField(const GridSpec& grid, double fill = 0.0)
      : GridData(grid, grid.dim() * (grid.dim() + 1) / 2, fill) {}

  static int index(int n, int i, int j) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i - 1) / 2 + (j - i);
  }
  int dim() const noexcept { return grid_.dim(); }
  double* component(int i, int j) { return channel(index(dim(), i, j)); }
  const double* component(int i, int j) const { return channel(index(dim(), i, j)); }
  double at(int i, int j, std::size_t p) const { return component(i, j)[p]; }

  /// a * I (as a constant field).
  static SymTensorField identity(const GridSpec& grid, double a = 1.0);

  SymTensorField& operator+=(const SymTensorField& o) { axpy(1.0, o); return *this; }
  SymTensorField& operator-=(const SymTensorField& o) { axpy(-1.0, o); return *this; }
  SymTensorField& operator*=(double a) { scale(a); return *this; }
};

/// Degree-k form; one channel per increasing multi-index. Degrees outside
/// [0, n] are allowed and carry no channels (the zero form).
class DifferentialForm : public GridData {
 public:
  DifferentialForm() = default;
  DifferentialForm(const GridSpec& grid, int degree);

  int degree() const noexcept { return degree_; }
  int dim() const noexcept { return grid_.dim(); }
  const ExteriorBasis& basis() const { return ExteriorBasis::get(grid_.dim()); }

  double* component(Mask m) { return channel(basis().index(m)); }
  const double* component(Mask m) const { return channel(basis().index(m)); }
  /// F_{i1...ik} at point p for an arbitrary index tuple (sign of the sorting
  /// permutation; zero on repeated indices).
  double value(const int* idx, std::size_t p) const;

  /// Constant form with a single nonzero component.
  static DifferentialForm basis_form(const GridSpec& grid, Mask m, double value = 1.0);

  DifferentialForm& operator+=(const DifferentialForm& o);
  DifferentialForm& operator-=(const DifferentialForm& o);
  DifferentialForm& operator*=(double a) { scale(a); return *this; }

 private:
  int degree_ = 0;
};

DifferentialForm operator+(DifferentialForm a, const DifferentialForm& b);
DifferentialForm operator-(DifferentialForm a, const DifferentialForm& b);
DifferentialForm operator*(double s, DifferentialForm a);

inline constexpr double kDefaultEpsPd = 1e-10;

/// Symmetric positive-definite metric with cached inverse and sqrt(det).
class MetricField {
 public:
  MetricField() = default;
  /// Throws DegenerateMetricError if the smallest eigenvalue at some point is
  /// below eps_pd.
  explicit MetricField(SymTensorField entries, double eps_pd = kDefaultEpsPd);
  static MetricField flat(const GridSpec& grid, double scale = 1.0);

  const GridSpec& grid() const noexcept { return g_.grid(); }
  int dim() const noexcept { return g_.dim(); }
  std::size_t points() const noexcept { return g_.points(); }
  double eps_pd() const noexcept { return eps_pd_; }

  const SymTensorField& tensor() const noexcept { return g_; }
  const SymTensorField& inverse() const noexcept { return ginv_; }
  const ScalarField& sqrt_det() const noexcept { return sqrtdet_; }
  /// True if every point carries the same matrix.
  bool uniform() const noexcept { return uniform_; }

  double g(int i, int j, std::size_t p) const { return g_.at(i, j, p); }
  double ginv(int i, int j, std::size_t p) const { return ginv_.at(i, j, p); }
  /// Dense n x n row-major copies at point p.
  void matrix(std::size_t p, double* out) const;
  void inverse_matrix(std::size_t p, double* out) const;
  /// Pointwise G_k tables (C(n,k)^2 entries per point, one point when the
  /// metric is uniform), built on first use and shared between copies.
  /// nullptr when the table would exceed the memory budget.
  const double* compound_table(int k) const;

 private:
  struct CompoundCache;
  std::shared_ptr<CompoundCache> cache_;
  SymTensorField g_;
  SymTensorField ginv_;
  ScalarField sqrtdet_;
  double eps_pd_ = kDefaultEpsPd;
  bool uniform_ = false;
};

/// Smallest eigenvalue of g over all points.
double min_eigenvalue(const MetricField& g);
/// Largest eigenvalue of g^{-1} over all points.
double max_inverse_eigenvalue(const MetricField& g);

/// Riemann sum of s * sqrt(det g) over the grid.
double integrate(const MetricField& g, const ScalarField& s);

ScalarField pointwise_product(const ScalarField& a, const ScalarField& b);
DifferentialForm scale_form(const ScalarField& s, const DifferentialForm& a);

}  // namespace sgflow
