#include "sgflow/tensor.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "sgflow/error.hpp"
#include "sgflow/forms.hpp"

namespace sgflow {

TensorField::TensorField(const GridSpec& grid, std::vector<int> slots, double weight)
    : GridData(grid, [&] {
        int c = 1;
        for (int a : slots) c *= binomial(grid.dim(), a);
        return c;
      }()),
      slots_(std::move(slots)),
      weight_(weight) {}

int TensorField::channel_index(const int* pos) const {
  int c = 0;
  for (std::size_t s = 0; s < slots_.size(); ++s) c = c * slot_size(static_cast<int>(s)) + pos[s];
  return c;
}

TensorField TensorField::from_scalar(const ScalarField& f) {
  TensorField t(f.grid(), {});
  t.raw() = f.raw();
  return t;
}

TensorField TensorField::from_form(const DifferentialForm& a) {
  TensorField t(a.grid(), {a.degree()});
  t.raw() = a.raw();
  return t;
}

TensorField TensorField::from_symmetric(const SymTensorField& s) {
  const int n = s.dim();
  TensorField t(s.grid(), {1, 1});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) std::copy_n(s.component(i, j), s.points(), t.channel(i * n + j));
  return t;
}

namespace {

struct Correction {
  int out;  // channel of T (before prepending the derivative index)
  int axis;  // index i being replaced
  int r;  // replacement index
  int src;  // channel of T holding the replaced component
  double sign;
};

std::vector<Correction> correction_terms(const TensorField& T) {
  const int n = T.grid().dim();
  const auto& basis = ExteriorBasis::get(n);
  const auto& slots = T.slots();
  const int ns = static_cast<int>(slots.size());
  std::vector<Correction> terms;
  std::vector<int> pos(ns, 0);
  for (int ch = 0; ch < T.channels(); ++ch) {
    int rem = ch;
    for (int s = ns - 1; s >= 0; --s) {
      pos[s] = rem % T.slot_size(s);
      rem /= T.slot_size(s);
    }
    for (int s = 0; s < ns; ++s) {
      const Mask m = basis.mask(slots[s], pos[s]);
      for (Mask rest = m; rest; rest &= rest - 1) {
        const int i = __builtin_ctz(rest);
        const Mask without = m & ~(Mask{1} << i);
        for (int r = 0; r < n; ++r) {
          if (without & (Mask{1} << r)) continue;
          // Component with i replaced by r in place: position of i in m is
          // fixed, so the sign is the parity of moving r there from its
          // sorted slot.
          const Mask target = without | (Mask{1} << r);
          const int from = popcount(without & ((Mask{1} << i) - 1));
          const int to = popcount(without & ((Mask{1} << r) - 1));
          const double sign = ((from - to) & 1) ? -1.0 : 1.0;
          std::vector<int> p2 = pos;
          p2[s] = basis.index(target);
          terms.push_back({ch, i, r, T.channel_index(p2.data()), sign});
        }
      }
    }
  }
  return terms;
}

}  // namespace

TensorField covariant_derivative(const ChristoffelField& gamma, const TensorField& T) {
  require_same_grid(gamma.grid(), T.grid(), "covariant_derivative");
  const GridSpec& grid = T.grid();
  const int n = grid.dim();
  std::vector<int> slots{1};
  slots.insert(slots.end(), T.slots().begin(), T.slots().end());
  TensorField out(grid, std::move(slots), T.weight());
  const int c = T.channels();
  const std::size_t np = T.points();
  for (int m = 0; m < n; ++m)
    for (int ch = 0; ch < c; ++ch) stencil::centered(grid, m, T.channel(ch), out.channel(m * c + ch));
  for (const Correction& t : correction_terms(T)) {
    const double* src = T.channel(t.src);
    for (int m = 0; m < n; ++m) {
      const double* gam = gamma.component(t.r, m, t.axis);
      double* dst = out.channel(m * c + t.out);
      for (std::size_t p = 0; p < np; ++p) dst[p] -= t.sign * gam[p] * src[p];
    }
  }
  return out;
}

TensorField covariant_derivative(const ChristoffelField& gamma, const TensorField& T, int order) {
  TensorField out = T;
  for (int i = 0; i < order; ++i) out = covariant_derivative(gamma, out);
  return out;
}

ScalarField norm_squared(const MetricField& g, const TensorField& T) {
  require_same_grid(g.grid(), T.grid(), "norm_squared");
  const int n = g.dim();
  const auto& slots = T.slots();
  const int ns = static_cast<int>(slots.size());
  ScalarField out(T.grid());
  if (T.channels() == 0) return out;
  int max_arity = 0;
  for (int a : slots) max_arity = std::max(max_arity, a);
  std::vector<std::vector<double>> compound(max_arity + 1);
  for (int a = 0; a <= max_arity; ++a) {
    const int c = binomial(n, a);
    compound[a].resize(static_cast<std::size_t>(c) * c);
  }
  const int total = T.channels();
  std::vector<double> u(total), v(total);
  double gi[kMaxDim * kMaxDim];
  for (std::size_t p = 0; p < T.points(); ++p) {
    if (p == 0 || !g.uniform()) {
      g.inverse_matrix(p, gi);
      for (int a = 0; a <= max_arity; ++a) compound_inverse(gi, n, a, compound[a].data());
    }
    for (int ch = 0; ch < total; ++ch) u[ch] = T.channel(ch)[p];
    // Raise one slot at a time: mode product with G_{a_s}.
    int inner = total;
    int outer = 1;
    for (int s = 0; s < ns; ++s) {
      const int cs = T.slot_size(s);
      inner /= cs;
      const double* G = compound[slots[s]].data();
      for (int o = 0; o < outer; ++o) {
        for (int b = 0; b < cs; ++b) {
          for (int in = 0; in < inner; ++in) {
            double acc = 0.0;
            for (int a = 0; a < cs; ++a) acc += G[b * cs + a] * u[(o * cs + a) * inner + in];
            v[(o * cs + b) * inner + in] = acc;
          }
        }
      }
      std::swap(u, v);
      outer *= cs;
    }
    double acc = 0.0;
    for (int ch = 0; ch < total; ++ch) acc += T.channel(ch)[p] * u[ch];
    out[p] = T.weight() * acc;
  }
  return out;
}

double sup_norm_squared(const MetricField& g, const TensorField& T) {
  const ScalarField s = norm_squared(g, T);
  return s.empty() ? 0.0 : std::max(0.0, s.max());
}

}  // namespace sgflow
