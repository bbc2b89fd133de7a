#include "sgflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <type_traits>

#include "sgflow/error.hpp"
#include "sgflow/forms.hpp"

namespace sgflow {

std::string to_string(Scheme s) { return s == Scheme::euler ? "euler" : "rk4"; }

std::string to_string(Gauge g) {
  switch (g) {
    case Gauge::none: return "none";
    case Gauge::deturck: return "deturck";
    case Gauge::f_gauged: return "f_gauged";
  }
  return "none";
}

Scheme parse_scheme(const std::string& s) {
  if (s == "euler") return Scheme::euler;
  if (s == "rk4") return Scheme::rk4;
  throw ConfigError("/flow/scheme", "expected \"euler\" or \"rk4\", got \"" + s + "\"");
}

Gauge parse_gauge(const std::string& s) {
  if (s == "none") return Gauge::none;
  if (s == "deturck") return Gauge::deturck;
  if (s == "f_gauged") return Gauge::f_gauged;
  throw ConfigError("/flow/gauge", "expected \"none\", \"deturck\" or \"f_gauged\", got \"" + s + "\"");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::t_end_reached: return "t_end_reached";
    case Termination::blow_up: return "blow_up";
    case Termination::positivity_lost: return "positivity_lost";
    case Termination::cfl_violation: return "cfl_violation";
  }
  return "t_end_reached";
}

DifferentialForm as_form(const ScalarField& f) {
  DifferentialForm out(f.grid(), 0);
  std::copy(f.raw().begin(), f.raw().end(), out.raw().begin());
  return out;
}

void ReducedState::validate() const {
  factor.validate(true);
  const GridSpec& grid = ghat.grid();
  const int n = grid.dim();
  if (n != 10 - p()) {
    throw ShapeError("ReducedState: base dimension " + std::to_string(n) + " does not match n = 10 - p = " +
                     std::to_string(10 - p()));
  }
  require_same_grid(grid, f.grid(), "ReducedState");
  require_same_grid(grid, beta.grid(), "ReducedState");
  require_same_grid(grid, psi.grid(), "ReducedState");
  if (beta.degree() != 3 - p()) throw ShapeError("ReducedState: beta must have degree 3 - p");
  if (psi.degree() != 4) throw ShapeError("ReducedState: psi must have degree 4");
}

ReducedState ReducedState::vacuum(const GridSpec& grid, const EinsteinFactor& factor) {
  ReducedState s{MetricField::flat(grid), ScalarField(grid), DifferentialForm(grid, 3 - factor.p()),
                 DifferentialForm(grid, 4), factor, 0.0};
  s.validate();
  return s;
}

void EuclideanRhs::axpy(double a, const EuclideanRhs& o) {
  dg.axpy(a, o.dg);
  dF.axpy(a, o.dF);
}

bool EuclideanRhs::all_finite() const { return dg.all_finite() && dF.all_finite(); }

double EuclideanRhs::sup_norm() const { return std::max(dg.sup_norm(), dF.sup_norm()); }

void ReducedRhs::axpy(double a, const ReducedRhs& o) {
  dghat.axpy(a, o.dghat);
  df.axpy(a, o.df);
  dbeta.axpy(a, o.dbeta);
  dpsi.axpy(a, o.dpsi);
}

bool ReducedRhs::all_finite() const {
  return dghat.all_finite() && df.all_finite() && dbeta.all_finite() && dpsi.all_finite();
}

double ReducedRhs::sup_norm() const {
  return std::max({dghat.sup_norm(), df.sup_norm(), dbeta.sup_norm(), dpsi.sup_norm()});
}

SymTensorField lie_derivative_metric(const MetricField& g, const ChristoffelField& gamma, const VectorField& X) {
  const GridSpec& grid = g.grid();
  const int n = g.dim();
  const std::size_t np = grid.size();
  VectorField low(grid);
  for (int i = 0; i < n; ++i) {
    double* li = low.component(i);
    for (int k = 0; k < n; ++k) {
      const double* gik = g.tensor().component(i, k);
      const double* xk = X.component(k);
      for (std::size_t p = 0; p < np; ++p) li[p] += gik[p] * xk[p];
    }
  }
  SymTensorField out(grid);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double* o = out.component(i, j);
      stencil::add_centered(grid, i, 1.0, low.component(j), o);
      stencil::add_centered(grid, j, 1.0, low.component(i), o);
      for (int k = 0; k < n; ++k) {
        const double* gk = gamma.component(k, i, j);
        const double* lk = low.component(k);
        for (std::size_t p = 0; p < np; ++p) o[p] -= 2.0 * gk[p] * lk[p];
      }
    }
  }
  return out;
}

DeTurck deturck_vector(const MetricField& g, const ChristoffelField& gamma, const ChristoffelField& gamma0) {
  const GridSpec& grid = g.grid();
  require_same_grid(grid, gamma0.grid(), "deturck_vector");
  const int n = g.dim();
  const std::size_t np = grid.size();
  DeTurck out{VectorField(grid), VectorField(grid), SymTensorField(grid)};
  for (int k = 0; k < n; ++k) {
    double* w = out.W.component(k);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double* gi = g.inverse().component(i, j);
        const double* a = gamma.component(k, i, j);
        const double* b = gamma0.component(k, i, j);
        for (std::size_t p = 0; p < np; ++p) w[p] += gi[p] * (a[p] - b[p]);
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    double* v = out.V.component(i);
    for (int k = 0; k < n; ++k) {
      const double* gik = g.tensor().component(i, k);
      const double* wk = out.W.component(k);
      for (std::size_t p = 0; p < np; ++p) v[p] += gik[p] * wk[p];
    }
  }
  out.lie_g = lie_derivative_metric(g, gamma, out.W);
  return out;
}

DeTurck deturck_vector(const MetricField& g, const MetricField& g0) {
  require_same_grid(g.grid(), g0.grid(), "deturck_vector");
  return deturck_vector(g, christoffels(g), christoffels(g0));
}

namespace {

ScalarField exp_scaled(const ScalarField& f, double c) {
  ScalarField out(f.grid());
  for (std::size_t p = 0; p < f.points(); ++p) out[p] = std::exp(c * f[p]);
  return out;
}

/// t += a * s * g pointwise.
void add_scaled_metric(SymTensorField& t, double a, const ScalarField& s, const MetricField& g) {
  const std::size_t np = t.points();
  for (int c = 0; c < t.channels(); ++c) {
    double* dst = t.channel(c);
    const double* src = g.tensor().channel(c);
    for (std::size_t p = 0; p < np; ++p) dst[p] += a * s[p] * src[p];
  }
}

}  // namespace

EuclideanRhs rhs_euclidean(const EuclideanState& s, Gauge gauge, const MetricField* g0,
                           const ChristoffelField* gamma0) {
  const MetricField& g = s.g;
  require_same_grid(g.grid(), s.F.grid(), "rhs_euclidean");
  if (gauge == Gauge::f_gauged) throw ConfigError("/flow/gauge", "f_gauged applies to reduced states only");
  const int n = g.dim();
  const int k = s.F.degree();
  const ChristoffelField gamma = christoffels(g);
  EuclideanRhs out{ricci(g, gamma), DifferentialForm(g.grid(), k)};
  out.dg *= -2.0;
  const FormSquare fs = form_square(g, s.F);
  out.dg += fs.sq;
  add_scaled_metric(out.dg, -1.0 / 3.0, fs.normsq, g);
  out.dF = hodge_laplacian(g, s.F);
  out.dF *= -1.0;
  if (3 * k - 1 == n) {
    DifferentialForm ff = exterior_derivative(hodge_star(g, s.sigma, wedge(s.F, s.F)));
    out.dF.axpy(-0.5 * s.sigma, ff);
  }
  if (gauge == Gauge::deturck) {
    if (!g0) throw ConfigError("/flow/reference", "DeTurck gauge needs a reference metric");
    const DeTurck dt = gamma0 ? deturck_vector(g, gamma, *gamma0) : deturck_vector(g, gamma, christoffels(*g0));
    out.dg += dt.lie_g;
    out.dF += lie_derivative(dt.W, s.F);
  }
  if (!out.all_finite()) throw BlowUpError("rhs_euclidean: non-finite right-hand side");
  return out;
}

ReducedRhs rhs_reduced(const ReducedState& s, Gauge gauge, const MetricField* g0, const ChristoffelField* gamma0) {
  s.validate();
  const MetricField& g = s.ghat;
  const GridSpec& grid = g.grid();
  const std::size_t np = grid.size();
  const int p = s.p();
  const int sigma = s.sigma();
  const double c = s.factor.c();
  const double lambda = s.factor.lambda;
  const bool gauged = gauge != Gauge::none;

  const ChristoffelField gamma = christoffels(g);
  const Hessian H = hessian_and_laplacian(g, gamma, s.f);
  const FormSquare bs = form_square(g, s.beta);
  const FormSquare ps = form_square(g, s.psi);
  ScalarField E(grid);
  for (std::size_t q = 0; q < np; ++q) E[q] = std::exp(-(p + 1) * s.f[q]);

  ReducedRhs out{ricci(g, gamma), ScalarField(grid), DifferentialForm(grid, s.beta.degree()),
                 DifferentialForm(grid, 4)};

  // Metric.
  out.dghat *= -2.0;
  out.dghat += ps.sq;
  {
    const int n = g.dim();
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        double* o = out.dghat.component(i, j);
        const double* b2 = bs.sq.component(i, j);
        const double* hij = H.hess.component(i, j);
        const double* fi = H.df.component(i);
        const double* fj = H.df.component(j);
        for (std::size_t q = 0; q < np; ++q) {
          o[q] += -sigma * E[q] * b2[q] + c * fi[q] * fj[q];
          if (!gauged) o[q] += (p + 1) * hij[q];
        }
      }
    }
    ScalarField trace_coeff(grid);
    for (std::size_t q = 0; q < np; ++q) trace_coeff[q] = (sigma * E[q] * bs.normsq[q] - ps.normsq[q]) / 3.0;
    add_scaled_metric(out.dghat, 1.0, trace_coeff, g);
  }

  // Warp function.
  for (std::size_t q = 0; q < np; ++q) {
    double v = H.lap[q] - (2.0 / 3.0) * sigma * E[q] * bs.normsq[q] - ps.normsq[q] / 3.0 -
               2.0 * lambda * std::exp(-s.f[q]);
    if (!gauged) v += c * H.gradsq[q];
    out.df[q] = v;
  }

  const DifferentialForm df1 = exterior_derivative(as_form(s.f));
  const int sign_p = (p % 2 == 0) ? 1 : -1;

  // β.
  if (!s.beta.empty()) {
    out.dbeta = hodge_laplacian(g, s.beta);
    out.dbeta *= -1.0;
    const double drift = -sign_p * (gauged ? (p + 1.0) : c);
    out.dbeta.axpy(drift, exterior_derivative(hodge_star(g, wedge(df1, hodge_star(g, s.beta)))));
    const DifferentialForm pp = wedge(s.psi, s.psi);
    if (!pp.empty()) {
      out.dbeta.axpy(0.5 * sigma * sign_p, exterior_derivative(scale_form(exp_scaled(s.f, c), hodge_star(g, pp))));
    }
  }

  // Ψ.
  if (!s.psi.empty()) {
    out.dpsi = hodge_laplacian(g, s.psi);
    out.dpsi *= -1.0;
    if (!gauged) {
      out.dpsi.axpy(sign_p * c, exterior_derivative(hodge_star(g, wedge(df1, hodge_star(g, s.psi)))));
    }
    if (!s.beta.empty()) {
      out.dpsi += exterior_derivative(scale_form(exp_scaled(s.f, -c), hodge_star(g, wedge(s.beta, s.psi))));
    }
  }

  if (gauge == Gauge::deturck) {
    if (!g0) throw ConfigError("/flow/reference", "DeTurck gauge needs a reference metric");
    const DeTurck dt = gamma0 ? deturck_vector(g, gamma, *gamma0) : deturck_vector(g, gamma, christoffels(*g0));
    out.dghat += dt.lie_g;
    const int n = g.dim();
    for (int k = 0; k < n; ++k) {
      const double* w = dt.W.component(k);
      const double* fk = H.df.component(k);
      for (std::size_t q = 0; q < np; ++q) out.df[q] += w[q] * fk[q];
    }
    if (!s.beta.empty()) out.dbeta += lie_derivative(dt.W, s.beta);
    if (!s.psi.empty()) out.dpsi += lie_derivative(dt.W, s.psi);
  }

  if (!out.all_finite()) throw BlowUpError("rhs_reduced: non-finite right-hand side");
  return out;
}

EuclideanState advance(const EuclideanState& s, const EuclideanRhs& k, double h) {
  SymTensorField g = s.g.tensor();
  g.axpy(h, k.dg);
  if (!g.all_finite()) throw BlowUpError("advance: non-finite metric");
  EuclideanState out{MetricField(std::move(g), s.g.eps_pd()), s.F, s.sigma, s.t + h};
  out.F.axpy(h, k.dF);
  return out;
}

ReducedState advance(const ReducedState& s, const ReducedRhs& k, double h) {
  SymTensorField g = s.ghat.tensor();
  g.axpy(h, k.dghat);
  if (!g.all_finite()) throw BlowUpError("advance: non-finite metric");
  ReducedState out{MetricField(std::move(g), s.ghat.eps_pd()), s.f, s.beta, s.psi, s.factor, s.t + h};
  out.f.axpy(h, k.df);
  out.beta.axpy(h, k.dbeta);
  out.psi.axpy(h, k.dpsi);
  return out;
}

namespace {

template <class State, class Rhs>
State step_impl(const State& s, double dt, Scheme scheme, const RhsFunction<State, Rhs>& rhs) {
  Rhs k1 = rhs(s);
  if (scheme == Scheme::euler) return advance(s, k1, dt);
  const Rhs k2 = rhs(advance(s, k1, 0.5 * dt));
  const Rhs k3 = rhs(advance(s, k2, 0.5 * dt));
  const Rhs k4 = rhs(advance(s, k3, dt));
  k1.axpy(2.0, k2);
  k1.axpy(2.0, k3);
  k1.axpy(1.0, k4);
  State out = advance(s, k1, dt / 6.0);
  out.t = s.t + dt;
  return out;
}

}  // namespace

EuclideanState step(const EuclideanState& s, double dt, Scheme scheme,
                    const RhsFunction<EuclideanState, EuclideanRhs>& rhs) {
  return step_impl<EuclideanState, EuclideanRhs>(s, dt, scheme, rhs);
}

ReducedState step(const ReducedState& s, double dt, Scheme scheme, const RhsFunction<ReducedState, ReducedRhs>& rhs) {
  return step_impl<ReducedState, ReducedRhs>(s, dt, scheme, rhs);
}

void FlowConfig::validate() const {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw ConfigError("/flow/dt", "must be finite and >= 0");
  if (dt == 0.0 && !(c_cfl > 0.0 && c_cfl <= 1.0)) throw ConfigError("/flow/c_cfl", "must lie in (0, 1]");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("/flow/t_end", "must be finite and >= 0");
  if (!(k_max > 0.0)) throw ConfigError("/flow/k_max", "must be positive");
  if (cadence < 1) throw ConfigError("/flow/cadence", "must be >= 1");
  if (max_halvings < 0) throw ConfigError("/flow/max_halvings", "must be >= 0");
  if (curvature_every < 1) throw ConfigError("/flow/curvature_every", "must be >= 1");
  if (shi.m < 1 || shi.m > 3) throw ConfigError("/flow/shi/m", "derivative order is capped at 3");
}

double cfl_limit(const MetricField& g, double c_cfl) {
  const double h = g.grid().min_spacing();
  if (!std::isfinite(h)) return std::numeric_limits<double>::infinity();
  return c_cfl * h * h / (2.0 * g.dim() * max_inverse_eigenvalue(g));
}

namespace {

void consider(BlowUpMonitor& m, double value, const char* name, double& best) {
  if (!std::isfinite(value)) {
    if (m.finite) m.dominant = name;
    m.finite = false;
    m.total = std::numeric_limits<double>::infinity();
    return;
  }
  if (m.finite) {
    m.total += value;
    if (value > best) {
      best = value;
      m.dominant = name;
    }
  }
}

double sup_abs(const ScalarField& f) {
  double m = 0.0;
  for (std::size_t p = 0; p < f.points(); ++p) {
    if (!std::isfinite(f[p])) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(f[p]));
  }
  return m;
}

double safe_form_norm(const MetricField& g, const DifferentialForm& a) {
  if (!a.all_finite()) return std::numeric_limits<double>::infinity();
  return sup_pointwise_norm(g, a);
}

double safe_rm(const MetricField& g) {
  const CurvatureBundle cb = curvature_suite(g);
  return std::sqrt(std::max(0.0, cb.norm_rm.all_finite() ? cb.norm_rm.max() : std::numeric_limits<double>::infinity()));
}

}  // namespace

BlowUpMonitor blow_up_quantity(const ReducedState& s, bool with_curvature) {
  BlowUpMonitor m;
  double best = -1.0;
  consider(m, sup_abs(s.f), "f", best);
  consider(m, safe_form_norm(s.ghat, s.beta), "beta", best);
  consider(m, safe_form_norm(s.ghat, s.psi), "psi", best);
  if (with_curvature) consider(m, safe_rm(s.ghat), "Rm", best);
  return m;
}

BlowUpMonitor blow_up_quantity(const EuclideanState& s, bool with_curvature) {
  BlowUpMonitor m;
  double best = -1.0;
  consider(m, safe_form_norm(s.g, s.F), "F", best);
  if (with_curvature) consider(m, safe_rm(s.g), "Rm", best);
  return m;
}

RhsFunction<ReducedState, ReducedRhs> make_rhs(const ReducedState& init, const FlowConfig& cfg) {
  std::shared_ptr<const MetricField> ref;
  std::shared_ptr<const ChristoffelField> gamma0;
  if (cfg.gauge == Gauge::deturck) {
    ref = std::make_shared<const MetricField>(
        cfg.reference == ReferenceMetric::flat ? MetricField::flat(init.ghat.grid()) : init.ghat);
    gamma0 = std::make_shared<const ChristoffelField>(christoffels(*ref));
  }
  const Gauge gauge = cfg.gauge;
  const bool freeze = cfg.freeze_metric;
  return [ref, gamma0, gauge, freeze](const ReducedState& s) {
    ReducedRhs k = rhs_reduced(s, gauge, ref.get(), gamma0.get());
    if (freeze) k.dghat.fill(0.0);
    return k;
  };
}

RhsFunction<EuclideanState, EuclideanRhs> make_rhs(const EuclideanState& init, const FlowConfig& cfg) {
  std::shared_ptr<const MetricField> ref;
  std::shared_ptr<const ChristoffelField> gamma0;
  if (cfg.gauge == Gauge::deturck) {
    ref = std::make_shared<const MetricField>(
        cfg.reference == ReferenceMetric::flat ? MetricField::flat(init.g.grid()) : init.g);
    gamma0 = std::make_shared<const ChristoffelField>(christoffels(*ref));
  }
  const Gauge gauge = cfg.gauge;
  const bool freeze = cfg.freeze_metric;
  return [ref, gamma0, gauge, freeze](const EuclideanState& s) {
    EuclideanRhs k = rhs_euclidean(s, gauge, ref.get(), gamma0.get());
    if (freeze) k.dg.fill(0.0);
    return k;
  };
}

namespace {

const MetricField& metric_of(const ReducedState& s) { return s.ghat; }
const MetricField& metric_of(const EuclideanState& s) { return s.g; }

template <class State, class Rhs>
RunResult<State> run_impl(const State& init, const FlowConfig& cfg, const Observer<State>& observe) {
  cfg.validate();
  if constexpr (std::is_same_v<State, EuclideanState>) {
    if (cfg.gauge == Gauge::f_gauged) throw ConfigError("/flow/gauge", "f_gauged applies to reduced runs only");
  }
  const RhsFunction<State, Rhs> rhs = make_rhs(init, cfg);
  RunResult<State> res;
  res.final_state = init;
  res.t = init.t;
  res.dt_cfl = cfl_limit(metric_of(init), cfg.c_cfl);
  double dt = cfg.dt;
  if (dt == 0.0) {
    if (!std::isfinite(res.dt_cfl)) throw ConfigError("/flow/dt", "required when no grid axis is resolved");
    dt = res.dt_cfl;
  } else if (dt > res.dt_cfl * (1.0 + 1e-12)) {
    res.cfl_exceeded = true;
    if (!cfg.force) {
      res.cause = Termination::cfl_violation;
      return res;
    }
  }
  res.dt_history.emplace_back(init.t, dt);

  State cur = init;
  const double t_stop = init.t + cfg.t_end;
  const double t_tol = 1e-12 * std::max(1.0, std::abs(t_stop));
  long last_observed = -1;
  auto emit = [&](long n) {
    if (observe && last_observed != n) observe(cur, n, dt);
    last_observed = n;
  };
  emit(0);

  while (cur.t < t_stop - t_tol) {
    const double h = std::min(dt, t_stop - cur.t);
    const bool curv = ((res.steps + 1) % cfg.curvature_every) == 0;
    bool ok = false;
    Termination failure = Termination::blow_up;
    BlowUpMonitor mon;
    State next;
    try {
      next = step(cur, h, cfg.scheme, rhs);
      mon = blow_up_quantity(next, curv);
      ok = mon.finite && mon.total <= cfg.k_max;
      if (!mon.finite) mon.total = std::numeric_limits<double>::infinity();
    } catch (const DegenerateMetricError&) {
      failure = Termination::positivity_lost;
      mon.dominant = "metric";
    } catch (const BlowUpError&) {
      mon = blow_up_quantity(cur, false);
      mon.finite = false;
      mon.total = std::numeric_limits<double>::infinity();
    }
    if (!ok) {
      if (res.halvings >= cfg.max_halvings) {
        res.cause = failure;
        res.quantity = mon.dominant;
        res.quantity_value = mon.total;
        break;
      }
      ++res.halvings;
      dt *= 0.5;
      res.dt_history.emplace_back(cur.t, dt);
      continue;
    }
    if (std::abs(next.t - t_stop) <= t_tol) next.t = t_stop;
    cur = std::move(next);
    ++res.steps;
    if (res.steps % cfg.cadence == 0) {
      const double lim = cfl_limit(metric_of(cur), cfg.c_cfl);
      res.dt_cfl = std::min(res.dt_cfl, lim);
      if (cfg.dt == 0.0 && dt > lim) {
        dt = lim;
        res.dt_history.emplace_back(cur.t, dt);
      } else if (dt > lim * (1.0 + 1e-12)) {
        res.cfl_exceeded = true;
        if (!cfg.force) {
          emit(res.steps);
          res.cause = Termination::cfl_violation;
          res.t = cur.t;
          res.final_state = std::move(cur);
          return res;
        }
      }
      emit(res.steps);
    }
  }
  emit(res.steps);
  res.t = cur.t;
  res.final_state = std::move(cur);
  return res;
}

}  // namespace

RunResult<ReducedState> run_flow(const ReducedState& init, const FlowConfig& cfg, const Observer<ReducedState>& observe) {
  init.validate();
  return run_impl<ReducedState, ReducedRhs>(init, cfg, observe);
}

RunResult<EuclideanState> run_flow(const EuclideanState& init, const FlowConfig& cfg,
                                   const Observer<EuclideanState>& observe) {
  return run_impl<EuclideanState, EuclideanRhs>(init, cfg, observe);
}

}  // namespace sgflow
