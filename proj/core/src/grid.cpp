#include "sgflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sgflow/error.hpp"

namespace sgflow {

GridSpec::GridSpec(std::span<const int> shape, std::span<const double> lengths) {
  if (shape.size() != lengths.size()) {
    throw ShapeError("GridSpec: shape and lengths differ in size");
  }
  if (shape.size() > static_cast<std::size_t>(kMaxDim)) {
    throw ShapeError("GridSpec: dimension must be in 0.." + std::to_string(kMaxDim));
  }
  dim_ = static_cast<int>(shape.size());
  for (int a = 0; a < dim_; ++a) {
    if (shape[a] != 1 && shape[a] < 4) {
      throw ShapeError("GridSpec: axis " + std::to_string(a) +
                       " needs >= 4 points (or exactly 1 for a homogeneous axis)");
    }
    if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a])) {
      throw ShapeError("GridSpec: axis " + std::to_string(a) + " period must be positive");
    }
    shape_[a] = shape[a];
    lengths_[a] = lengths[a];
  }
  finalize();
}

GridSpec::GridSpec(std::initializer_list<int> shape, std::initializer_list<double> lengths)
    : GridSpec(std::span<const int>(shape.begin(), shape.size()),
               std::span<const double>(lengths.begin(), lengths.size())) {}

GridSpec GridSpec::cube(int dim, int points, double length) {
  std::vector<int> s(static_cast<std::size_t>(dim), points);
  std::vector<double> l(static_cast<std::size_t>(dim), length);
  return GridSpec(s, l);
}

GridSpec GridSpec::homogeneous(int dim, double length) { return cube(dim, 1, length); }

void GridSpec::finalize() {
  size_ = 1;
  for (int a = dim_ - 1; a >= 0; --a) {
    stride_[a] = size_;
    size_ *= static_cast<std::size_t>(shape_[a]);
  }
}

double GridSpec::min_spacing() const {
  double h = std::numeric_limits<double>::infinity();
  for (int a = 0; a < dim_; ++a) {
    if (resolved(a)) h = std::min(h, spacing(a));
  }
  return h;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= spacing(a);
  return v;
}

double GridSpec::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= lengths_[a];
  return v;
}

double GridSpec::coordinate(std::size_t point, int axis) const {
  return axis_index(point, axis) * spacing(axis);
}

std::vector<int> GridSpec::shape_vector() const { return {shape_.begin(), shape_.begin() + dim_}; }

std::vector<double> GridSpec::length_vector() const {
  return {lengths_.begin(), lengths_.begin() + dim_};
}

GridSpec GridSpec::refined(int factor) const {
  std::vector<int> s = shape_vector();
  for (int& x : s) {
    if (x > 1) x *= factor;
  }
  return GridSpec(s, length_vector());
}

bool operator==(const GridSpec& a, const GridSpec& b) {
  if (a.dim_ != b.dim_) return false;
  for (int i = 0; i < a.dim_; ++i) {
    if (a.shape_[i] != b.shape_[i] || a.lengths_[i] != b.lengths_[i]) return false;
  }
  return true;
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
  if (!(a == b)) throw ShapeError(std::string(where) + ": operands live on different grids");
}

namespace stencil {
namespace {

// Calls fn(i, im, ip, len) for every position i along `axis` and every
// contiguous run of `len` points sharing it; im and ip are the offsets of the
// periodic neighbours along the axis. Runs are as long as the memory layout
// allows, so the inner loops vectorize.
template <class Fn>
void for_each_run(const GridSpec& grid, int axis, Fn&& fn) {
  const std::size_t stride = grid.stride(axis);
  const std::size_t count = static_cast<std::size_t>(grid.shape(axis));
  const std::size_t block = stride * count;
  for (std::size_t outer = 0; outer < grid.size(); outer += block) {
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t ip = (i + 1 == count) ? 0 : i + 1;
      const std::size_t im = (i == 0) ? count - 1 : i - 1;
      fn(outer + i * stride, outer + im * stride, outer + ip * stride, stride);
    }
  }
}

// Along the fastest axis runs have length one; walk whole lines instead.
template <class Fn>
void for_each_line(const GridSpec& grid, int axis, Fn&& fn) {
  const std::size_t count = static_cast<std::size_t>(grid.shape(axis));
  for (std::size_t base = 0; base < grid.size(); base += count) {
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t ip = (i + 1 == count) ? 0 : i + 1;
      const std::size_t im = (i == 0) ? count - 1 : i - 1;
      fn(base + i, base + im, base + ip, 1);
    }
  }
}

template <class Fn>
void sweep(const GridSpec& grid, int axis, Fn&& fn) {
  if (grid.stride(axis) == 1) {
    for_each_line(grid, axis, fn);
  } else {
    for_each_run(grid, axis, fn);
  }
}

}  // namespace

void centered(const GridSpec& grid, int axis, const double* in, double* out) {
  if (!grid.resolved(axis)) {
    std::fill(out, out + grid.size(), 0.0);
    return;
  }
  const double inv = 1.0 / (2.0 * grid.spacing(axis));
  sweep(grid, axis, [&](std::size_t o, std::size_t m, std::size_t p, std::size_t len) {
    double* __restrict dst = out + o;
    const double* a = in + p;
    const double* b = in + m;
    for (std::size_t j = 0; j < len; ++j) dst[j] = (a[j] - b[j]) * inv;
  });
}

void add_centered(const GridSpec& grid, int axis, double scale, const double* in, double* out) {
  if (!grid.resolved(axis)) return;
  const double inv = scale / (2.0 * grid.spacing(axis));
  sweep(grid, axis, [&](std::size_t o, std::size_t m, std::size_t p, std::size_t len) {
    double* __restrict dst = out + o;
    const double* a = in + p;
    const double* b = in + m;
    for (std::size_t j = 0; j < len; ++j) dst[j] += (a[j] - b[j]) * inv;
  });
}

void second(const GridSpec& grid, int axis, const double* in, double* out) {
  if (!grid.resolved(axis)) {
    std::fill(out, out + grid.size(), 0.0);
    return;
  }
  const double h = grid.spacing(axis);
  const double inv = 1.0 / (h * h);
  sweep(grid, axis, [&](std::size_t o, std::size_t m, std::size_t p, std::size_t len) {
    double* __restrict dst = out + o;
    const double* a = in + p;
    const double* c = in + o;
    const double* b = in + m;
    for (std::size_t j = 0; j < len; ++j) dst[j] = (a[j] - 2.0 * c[j] + b[j]) * inv;
  });
}

}  // namespace stencil
}  // namespace sgflow
