#include "sgflow/forms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "detail.hpp"
#include "sgflow/error.hpp"

namespace sgflow {
namespace {

// G_k at each point: the metric's cached table when available, otherwise
// recomputed per point.
class Compound {
 public:
  Compound(const MetricField& g, int k)
      : g_(g), n_(g.dim()), k_(k), c_(binomial(n_, k)), base_(g.compound_table(k)) {
    if (base_) {
      stride_ = g.uniform() ? 0 : static_cast<std::size_t>(c_) * c_;
    } else {
      table_.resize(static_cast<std::size_t>(c_) * c_);
      if (g_.uniform()) load(0);
    }
  }
  int size() const { return c_; }
  const double* at(std::size_t p) {
    if (base_) return base_ + p * stride_;
    if (!g_.uniform()) load(p);
    return table_.data();
  }

 private:
  void load(std::size_t p) {
    double buf[kMaxDim * kMaxDim];
    g_.inverse_matrix(p, buf);
    compound_inverse(buf, n_, k_, table_.data());
  }

  const MetricField& g_;
  int n_, k_, c_;
  const double* base_;
  std::size_t stride_ = 0;
  std::vector<double> table_;
};

// Axis lists of every basis multi-index, per (n, k).
struct AxisTable {
  std::array<std::array<std::vector<std::array<int, kMaxDim>>, kMaxDim + 1>, kMaxDim + 1> idx;
  AxisTable() {
    for (int n = 0; n <= kMaxDim; ++n) {
      const auto& basis = ExteriorBasis::get(n);
      for (int k = 0; k <= n; ++k) {
        idx[n][k].resize(basis.count(k));
        for (int a = 0; a < basis.count(k); ++a) ExteriorBasis::axes(basis.mask(k, a), idx[n][k][a].data());
      }
    }
  }
  static const AxisTable& get() {
    static const AxisTable t;
    return t;
  }
};

int below(Mask m, int axis) { return popcount(m & ((Mask{1} << axis) - 1)); }

}  // namespace

void compound_inverse(const double* ginv, int n, int k, double* out) {
  if (k < 0 || k > n) return;
  if (k == 0) {
    out[0] = 1.0;
    return;
  }
  const auto& idx = AxisTable::get().idx[n][k];
  const int c = static_cast<int>(idx.size());
  auto G = [&](int i, int j) { return ginv[i * n + j]; };
  double m[kMaxDim * kMaxDim];
  for (int a = 0; a < c; ++a) {
    const int* r = idx[a].data();
    for (int b = a; b < c; ++b) {
      const int* s = idx[b].data();
      double v;
      if (k == 1) {
        v = G(r[0], s[0]);
      } else if (k == 2) {
        v = G(r[0], s[0]) * G(r[1], s[1]) - G(r[0], s[1]) * G(r[1], s[0]);
      } else if (k == 3) {
        v = G(r[0], s[0]) * (G(r[1], s[1]) * G(r[2], s[2]) - G(r[1], s[2]) * G(r[2], s[1])) -
            G(r[0], s[1]) * (G(r[1], s[0]) * G(r[2], s[2]) - G(r[1], s[2]) * G(r[2], s[0])) +
            G(r[0], s[2]) * (G(r[1], s[0]) * G(r[2], s[1]) - G(r[1], s[1]) * G(r[2], s[0]));
      } else {
        for (int x = 0; x < k; ++x)
          for (int y = 0; y < k; ++y) m[x * k + y] = G(r[x], s[y]);
        v = detail::small_det(m, k);
      }
      out[a * c + b] = out[b * c + a] = v;
    }
  }
}

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
  require_same_grid(a.grid(), b.grid(), "wedge");
  DifferentialForm out(a.grid(), a.degree() + b.degree());
  if (out.empty() || a.empty() || b.empty()) return out;
  const auto& basis = a.basis();
  const std::size_t np = a.points();
  for (int i = 0; i < a.channels(); ++i) {
    const Mask mi = basis.mask(a.degree(), i);
    for (int j = 0; j < b.channels(); ++j) {
      const Mask mj = basis.mask(b.degree(), j);
      const int s = merge_sign(mi, mj);
      if (s == 0) continue;
      double* dst = out.component(mi | mj);
      const double* x = a.channel(i);
      const double* y = b.channel(j);
      for (std::size_t p = 0; p < np; ++p) dst[p] += s * x[p] * y[p];
    }
  }
  return out;
}

int star_sign(int n, int k, int sigma) { return 2 * k <= n ? 1 : -sigma; }

DifferentialForm hodge_star(const MetricField& g, const DifferentialForm& a) {
  require_same_grid(g.grid(), a.grid(), "hodge_star");
  const int n = g.dim();
  const int k = a.degree();
  DifferentialForm out(a.grid(), n - k);
  if (a.empty()) return out;
  const auto& basis = a.basis();
  const int c = a.channels();
  std::vector<double*> dst(c);
  std::vector<double> eps(c);
  std::vector<const double*> src(c);
  for (int i = 0; i < c; ++i) {
    const Mask m = basis.mask(k, i);
    dst[i] = out.component(basis.full() & ~m);
    eps[i] = merge_sign(m, basis.full() & ~m);
    src[i] = a.channel(i);
  }
  const double* w = g.sqrt_det().data();
  Compound G(g, k);
  std::vector<double> vals(c);
  for (std::size_t p = 0; p < a.points(); ++p) {
    const double* t = G.at(p);
    for (int j = 0; j < c; ++j) vals[j] = src[j][p];
    for (int i = 0; i < c; ++i) {
      double s = 0.0;
      for (int j = 0; j < c; ++j) s += t[i * c + j] * vals[j];
      dst[i][p] = w[p] * eps[i] * s;
    }
  }
  return out;
}

DifferentialForm hodge_star(const MetricField& g, int sigma, const DifferentialForm& a) {
  DifferentialForm out = hodge_star(g, a);
  if (star_sign(g.dim(), a.degree(), sigma) < 0) out.scale(-1.0);
  return out;
}

DifferentialForm exterior_derivative(const DifferentialForm& a) {
  const int k = a.degree();
  DifferentialForm out(a.grid(), k + 1);
  if (out.empty() || a.empty()) return out;
  const auto& basis = a.basis();
  const GridSpec& grid = a.grid();
  for (int o = 0; o < out.channels(); ++o) {
    const Mask mj = basis.mask(k + 1, o);
    double* dst = out.channel(o);
    for (Mask rest = mj; rest; rest &= rest - 1) {
      const int axis = __builtin_ctz(rest);
      const double sign = (below(mj, axis) & 1) ? -1.0 : 1.0;
      stencil::add_centered(grid, axis, sign, a.component(mj & ~(Mask{1} << axis)), dst);
    }
  }
  return out;
}

DifferentialForm codifferential(const MetricField& g, const DifferentialForm& a) {
  const int n = g.dim();
  const int k = a.degree();
  if (k <= 0 || k > n) return DifferentialForm(a.grid(), k - 1);
  DifferentialForm out = hodge_star(g, exterior_derivative(hodge_star(g, a)));
  if (((n * (k + 1) + 1) & 1) != 0) out.scale(-1.0);
  return out;
}

DifferentialForm codifferential(const MetricField& g, int, const DifferentialForm& a) {
  return codifferential(g, a);
}

DifferentialForm hodge_laplacian(const MetricField& g, const DifferentialForm& a) {
  const int n = g.dim();
  const int k = a.degree();
  DifferentialForm out(a.grid(), k);
  if (out.empty()) return out;
  if (k > 0) out += exterior_derivative(codifferential(g, a));
  if (k < n) out += codifferential(g, exterior_derivative(a));
  return out;
}

DifferentialForm hodge_laplacian(const MetricField& g, int, const DifferentialForm& a) {
  return hodge_laplacian(g, a);
}

ScalarField pointwise_inner(const MetricField& g, const DifferentialForm& a, const DifferentialForm& b) {
  require_same_grid(g.grid(), a.grid(), "pointwise_inner");
  require_same_grid(a.grid(), b.grid(), "pointwise_inner");
  if (a.degree() != b.degree()) throw ShapeError("pointwise_inner: degree mismatch");
  ScalarField out(a.grid());
  if (a.empty()) return out;
  const int c = a.channels();
  Compound G(g, a.degree());
  std::vector<double> x(c), y(c);
  for (std::size_t p = 0; p < a.points(); ++p) {
    const double* t = G.at(p);
    for (int i = 0; i < c; ++i) {
      x[i] = a.channel(i)[p];
      y[i] = b.channel(i)[p];
    }
    double s = 0.0;
    for (int i = 0; i < c; ++i) {
      double r = 0.0;
      for (int j = 0; j < c; ++j) r += t[i * c + j] * y[j];
      s += x[i] * r;
    }
    out[p] = s;
  }
  return out;
}

ScalarField norm_squared(const MetricField& g, const DifferentialForm& F) { return pointwise_inner(g, F, F); }

double inner_product(const MetricField& g, const DifferentialForm& a, const DifferentialForm& b) {
  return integrate(g, pointwise_inner(g, a, b));
}

double sup_pointwise_norm(const MetricField& g, const DifferentialForm& a) {
  if (a.empty()) return 0.0;
  const ScalarField s = norm_squared(g, a);
  double m = 0.0;
  for (std::size_t p = 0; p < s.points(); ++p) m = std::max(m, s[p]);
  return std::sqrt(m);
}

FormSquare form_square(const MetricField& g, const DifferentialForm& F) {
  require_same_grid(g.grid(), F.grid(), "form_square");
  const int n = g.dim();
  const int k = F.degree();
  FormSquare out{SymTensorField(F.grid()), ScalarField(F.grid())};
  if (F.empty()) return out;
  if (k == 0) {
    for (std::size_t p = 0; p < F.points(); ++p) out.normsq[p] = F.channel(0)[p] * F.channel(0)[p];
    return out;
  }
  const auto& basis = F.basis();
  const int cf = F.channels();
  const int cm = basis.count(k - 1);
  // ι_i F has component A equal to sign * F_{A ∪ i}.
  struct Term {
    int i, a, src;
    double sign;
  };
  std::vector<Term> terms;
  for (int a = 0; a < cm; ++a) {
    const Mask ma = basis.mask(k - 1, a);
    for (int i = 0; i < n; ++i) {
      if (ma & (Mask{1} << i)) continue;
      const Mask mi = ma | (Mask{1} << i);
      terms.push_back({i, a, basis.index(mi), (below(ma, i) & 1) ? -1.0 : 1.0});
    }
  }
  Compound Gm(g, k - 1);
  Compound Gk(g, k);
  std::vector<double> v(static_cast<std::size_t>(n) * cm), w(static_cast<std::size_t>(n) * cm), f(cf);
  std::vector<double*> sq(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sq[i * n + j] = out.sq.component(i, j);
  for (std::size_t p = 0; p < F.points(); ++p) {
    std::fill(v.begin(), v.end(), 0.0);
    for (const Term& t : terms) v[t.i * cm + t.a] = t.sign * F.channel(t.src)[p];
    const double* gm = Gm.at(p);
    for (int i = 0; i < n; ++i) {
      for (int b = 0; b < cm; ++b) {
        double s = 0.0;
        for (int a = 0; a < cm; ++a) s += gm[b * cm + a] * v[i * cm + a];
        w[i * cm + b] = s;
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int b = 0; b < cm; ++b) s += v[i * cm + b] * w[j * cm + b];
        sq[i * n + j][p] = s;
      }
    }
    const double* gk = Gk.at(p);
    for (int a = 0; a < cf; ++a) f[a] = F.channel(a)[p];
    double s = 0.0;
    for (int a = 0; a < cf; ++a) {
      double r = 0.0;
      for (int b = 0; b < cf; ++b) r += gk[a * cf + b] * f[b];
      s += f[a] * r;
    }
    out.normsq[p] = s;
  }
  return out;
}

DifferentialForm interior(const VectorField& V, const DifferentialForm& a) {
  require_same_grid(V.grid(), a.grid(), "interior");
  const int k = a.degree();
  DifferentialForm out(a.grid(), k - 1);
  if (out.empty() || a.empty()) return out;
  const int n = a.dim();
  const auto& basis = a.basis();
  const std::size_t np = a.points();
  for (int o = 0; o < out.channels(); ++o) {
    const Mask mj = basis.mask(k - 1, o);
    double* dst = out.channel(o);
    for (int i = 0; i < n; ++i) {
      if (mj & (Mask{1} << i)) continue;
      const double sign = (below(mj, i) & 1) ? -1.0 : 1.0;
      const double* src = a.component(mj | (Mask{1} << i));
      const double* vi = V.component(i);
      for (std::size_t p = 0; p < np; ++p) dst[p] += sign * vi[p] * src[p];
    }
  }
  return out;
}

DifferentialForm lie_derivative(const VectorField& V, const DifferentialForm& a) {
  DifferentialForm out = exterior_derivative(interior(V, a));
  if (a.degree() < a.dim()) out += interior(V, exterior_derivative(a));
  return out;
}

}  // namespace sgflow
