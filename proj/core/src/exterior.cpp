#include "sgflow/exterior.hpp"

#include <array>
#include <memory>
#include <mutex>

#include "sgflow/error.hpp"

namespace sgflow {

int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

int merge_sign(Mask a, Mask b) {
  if (a & b) return 0;
  int inversions = 0;
  for (Mask rest = b; rest; rest &= rest - 1) {
    const int j = __builtin_ctz(rest);
    inversions += popcount(a >> (j + 1));
  }
  return (inversions & 1) ? -1 : 1;
}

int ExteriorBasis::axes(Mask m, int* out) {
  int c = 0;
  for (; m; m &= m - 1) out[c++] = __builtin_ctz(m);
  return c;
}

namespace {

void enumerate(int n, int k, int start, Mask acc, std::vector<Mask>& out) {
  if (k == 0) {
    out.push_back(acc);
    return;
  }
  for (int i = start; i <= n - k; ++i) enumerate(n, k - 1, i + 1, acc | (Mask{1} << i), out);
}

}  // namespace

ExteriorBasis::ExteriorBasis(int n) : n_(n), masks_(n + 1), index_(std::size_t{1} << n, -1) {
  for (int k = 0; k <= n; ++k) {
    enumerate(n, k, 0, 0, masks_[k]);
    for (std::size_t i = 0; i < masks_[k].size(); ++i) index_[masks_[k][i]] = static_cast<int>(i);
  }
}

const ExteriorBasis& ExteriorBasis::get(int n) {
  if (n < 0 || n > kMaxDim) throw ShapeError("ExteriorBasis: dimension out of range");
  static std::array<std::unique_ptr<ExteriorBasis>, kMaxDim + 1> cache;
  static std::once_flag once;
  std::call_once(once, [] {
    for (int d = 0; d <= kMaxDim; ++d) cache[d].reset(new ExteriorBasis(d));
  });
  return *cache[n];
}

}  // namespace sgflow
