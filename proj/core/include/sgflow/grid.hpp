#pragma once

#include <array>
#include <initializer_list>
#include <cstddef>
#include <span>
#include <vector>

namespace sgflow {

inline constexpr int kMaxDim = 10;

/// Uniform periodic grid on a flat torus.
///
/// Each axis is either resolved (at least 4 points) or homogeneous (exactly
/// one point). Fields never vary along a homogeneous axis and every
/// difference operator along it is identically zero, which lets a 7- or
/// 10-dimensional base carry data that only varies in two directions.
/// Points are stored row-major: the last axis is fastest.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(std::span<const int> shape, std::span<const double> lengths);
  GridSpec(std::initializer_list<int> shape, std::initializer_list<double> lengths);

  /// Cube grid with `points` per axis and period `length`.
  static GridSpec cube(int dim, int points, double length = 1.0);
  /// A single point in `dim` dimensions: every axis homogeneous.
  static GridSpec homogeneous(int dim, double length = 1.0);

  int dim() const noexcept { return dim_; }
  int shape(int axis) const { return shape_[axis]; }
  double length(int axis) const { return lengths_[axis]; }
  double spacing(int axis) const { return lengths_[axis] / shape_[axis]; }
  bool resolved(int axis) const { return shape_[axis] > 1; }
  std::size_t size() const noexcept { return size_; }
  std::size_t stride(int axis) const { return stride_[axis]; }

  /// Smallest spacing over resolved axes; +inf if none are resolved.
  double min_spacing() const;
  /// Volume of one cell; the Riemann-sum weight (product of all spacings).
  double cell_volume() const;
  double volume() const;

  /// Coordinate of `point` along `axis`.
  double coordinate(std::size_t point, int axis) const;
  int axis_index(std::size_t point, int axis) const {
    return static_cast<int>((point / stride_[axis]) % static_cast<std::size_t>(shape_[axis]));
  }

  std::vector<int> shape_vector() const;
  std::vector<double> length_vector() const;

  /// Same grid with every resolved axis refined by `factor`.
  GridSpec refined(int factor) const;

  friend bool operator==(const GridSpec& a, const GridSpec& b);

 private:
  void finalize();

  int dim_ = 0;
  std::array<int, kMaxDim> shape_{};
  std::array<double, kMaxDim> lengths_{};
  std::array<std::size_t, kMaxDim> stride_{};
  std::size_t size_ = 0;
};

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where);

/// Periodic difference kernels on one channel (`in`, `out` of size grid.size()).
/// `out` must not alias `in`.
namespace stencil {

/// (u[i+1] - u[i-1]) / (2h); zero along a homogeneous axis.
void centered(const GridSpec& grid, int axis, const double* in, double* out);
/// out += scale * centered(in)
void add_centered(const GridSpec& grid, int axis, double scale, const double* in, double* out);
/// (u[i+1] - 2u[i] + u[i-1]) / h^2; zero along a homogeneous axis.
void second(const GridSpec& grid, int axis, const double* in, double* out);

}  // namespace stencil

}  // namespace sgflow
