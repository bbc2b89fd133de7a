#include "sgflow/ode.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "sgflow/error.hpp"

namespace sgflow {
namespace {

int base_dim(const HomogeneousState& h) { return 10 - h.p; }

double& var_ref(HomogeneousState& h, OdeVar v) {
  switch (v) {
    case OdeVar::s: return h.s;
    case OdeVar::f: return h.f;
    case OdeVar::b: return h.b;
    case OdeVar::c: return h.c;
    case OdeVar::kappa: return h.kappa;
    case OdeVar::lambda: return h.lambda;
  }
  return h.s;
}

std::vector<OdeVar> state_vars(const HomogeneousState& h) {
  switch (h.preset) {
    case OdePreset::psi: return {OdeVar::s, OdeVar::f, OdeVar::c};
    case OdePreset::beta: return {OdeVar::s, OdeVar::f, OdeVar::b};
    case OdePreset::scalar: break;
  }
  return {OdeVar::s, OdeVar::f};
}

double rhs_component(const HomogeneousRhs& r, OdeVar v) {
  switch (v) {
    case OdeVar::s: return r.ds;
    case OdeVar::f: return r.df;
    case OdeVar::b: return r.db;
    case OdeVar::c: return r.dc;
    default: return 0.0;
  }
}

HomogeneousState advance(const HomogeneousState& h, const HomogeneousRhs& k, double dt) {
  HomogeneousState o = h;
  o.s += dt * k.ds;
  o.f += dt * k.df;
  o.b += dt * k.db;
  o.c += dt * k.dc;
  o.t += dt;
  return o;
}

}  // namespace

std::string to_string(OdePreset p) {
  switch (p) {
    case OdePreset::psi: return "psi";
    case OdePreset::beta: return "beta";
    case OdePreset::scalar: return "scalar";
  }
  return "scalar";
}

OdePreset parse_preset(const std::string& s) {
  if (s == "psi") return OdePreset::psi;
  if (s == "beta") return OdePreset::beta;
  if (s == "scalar") return OdePreset::scalar;
  throw ConfigError("/ode/preset", "unknown preset '" + s + "' (expected psi, beta or scalar)");
}

std::string to_string(OdeVar v) {
  switch (v) {
    case OdeVar::s: return "s";
    case OdeVar::f: return "f";
    case OdeVar::b: return "b";
    case OdeVar::c: return "c";
    case OdeVar::kappa: return "kappa";
    case OdeVar::lambda: return "lambda";
  }
  return "s";
}

OdeVar parse_ode_var(const std::string& s) {
  for (OdeVar v : {OdeVar::s, OdeVar::f, OdeVar::b, OdeVar::c, OdeVar::kappa, OdeVar::lambda}) {
    if (to_string(v) == s) return v;
  }
  throw ConfigError("/ode/newton/free", "unknown variable '" + s + "'");
}

void HomogeneousState::validate() const {
  if (p < 0 || p > 10) throw ConfigError("/p", "must lie in 0..10");
  if (sigma != 1 && sigma != -1) throw ConfigError("/sigma", "must be +1 or -1");
  if (!(s > 0.0)) throw ConfigError("/ode/s", "base scale must be positive");
  if (preset == OdePreset::psi && p != 6) throw ConfigError("/ode/preset", "psi preset requires p = 6");
  if (preset == OdePreset::beta && p != 3) throw ConfigError("/ode/preset", "beta preset requires p = 3");
  if (preset != OdePreset::beta && b != 0.0) throw ConfigError("/ode/b", "only the beta preset carries b");
  if (preset != OdePreset::psi && c != 0.0) throw ConfigError("/ode/c", "only the psi preset carries c");
}

HomogeneousState HomogeneousState::psi_preset(double c, double kappa, double lambda, int sigma) {
  HomogeneousState h;
  h.preset = OdePreset::psi;
  h.p = 6;
  h.c = c;
  h.kappa = kappa;
  h.lambda = lambda;
  h.sigma = sigma;
  return h;
}

HomogeneousState HomogeneousState::beta_preset(double b, double kappa, double lambda, int sigma) {
  HomogeneousState h;
  h.preset = OdePreset::beta;
  h.p = 3;
  h.b = b;
  h.kappa = kappa;
  h.lambda = lambda;
  h.sigma = sigma;
  return h;
}

HomogeneousState HomogeneousState::scalar_preset(int p, double f, double lambda, int sigma) {
  HomogeneousState h;
  h.p = p;
  h.f = f;
  h.lambda = lambda;
  h.sigma = sigma;
  return h;
}

double HomogeneousRhs::norm() const { return std::max({std::abs(ds), std::abs(df), std::abs(db), std::abs(dc)}); }

HomogeneousRhs homogeneous_rhs(const HomogeneousState& h) {
  h.validate();
  HomogeneousRhs r;
  r.ds = -2.0 * h.kappa;
  r.df = -2.0 * h.lambda * std::exp(-h.f);
  if (h.preset == OdePreset::psi) {
    const double psi_sq = h.c * h.c / (h.s * h.s * h.s * h.s);
    r.ds += 2.0 / 3.0 * psi_sq * h.s;
    r.df -= psi_sq / 3.0;
  } else if (h.preset == OdePreset::beta) {
    const double E = std::exp(-(h.p + 1) * h.f);
    r.ds += h.sigma * E * h.b * h.b * h.s / 3.0;
    r.df -= 2.0 / 3.0 * h.sigma * E * h.b * h.b;
  }
  return r;
}

ReducedState to_reduced_state(const HomogeneousState& h) {
  h.validate();
  const GridSpec grid = GridSpec::homogeneous(base_dim(h));
  ReducedState st = ReducedState::vacuum(grid, EinsteinFactor{h.p + 1, h.sigma, h.lambda});
  SymTensorField g = SymTensorField::identity(grid);
  g *= h.s;
  st.ghat = MetricField(std::move(g));
  st.f[0] = h.f;
  if (h.preset == OdePreset::beta) st.beta.channel(0)[0] = h.b;
  if (h.preset == OdePreset::psi) st.psi.channel(0)[0] = h.c;
  st.t = h.t;
  return st;
}

SymTensorField base_ricci(const HomogeneousState& h) {
  SymTensorField r = SymTensorField::identity(GridSpec::homogeneous(base_dim(h)));
  r *= h.kappa;
  return r;
}

namespace {

Eigen::MatrixXd jacobian(const HomogeneousState& h, const std::vector<OdeVar>& rows,
                         const std::vector<OdeVar>& cols, double fd_step) {
  Eigen::MatrixXd J(rows.size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    HomogeneousState hp = h, hm = h;
    const double x = var_ref(hp, cols[j]);
    const double step = fd_step * std::max(1.0, std::abs(x));
    var_ref(hp, cols[j]) = x + step;
    var_ref(hm, cols[j]) = x - step;
    const HomogeneousRhs rp = homogeneous_rhs(hp), rm = homogeneous_rhs(hm);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      J(i, j) = (rhs_component(rp, rows[i]) - rhs_component(rm, rows[i])) / (2.0 * step);
    }
  }
  return J;
}

}  // namespace

std::vector<std::complex<double>> linearization_spectrum(const HomogeneousState& h, double fd_step) {
  const std::vector<OdeVar> vars = state_vars(h);
  const Eigen::MatrixXd J = jacobian(h, vars, vars, fd_step);
  Eigen::EigenSolver<Eigen::MatrixXd> es(J, false);
  std::vector<std::complex<double>> ev(es.eigenvalues().begin(), es.eigenvalues().end());
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  return ev;
}

NewtonResult newton_stationary(const HomogeneousState& guess, const std::vector<OdeVar>& free, const NewtonOptions& opt) {
  guess.validate();
  if (free.empty()) throw ConfigError("/ode/newton/free", "at least one free variable is required");
  for (OdeVar v : free) {
    if ((v == OdeVar::b && guess.preset != OdePreset::beta) || (v == OdeVar::c && guess.preset != OdePreset::psi)) {
      throw ConfigError("/ode/newton/free", "variable '" + to_string(v) + "' is not active in preset " + to_string(guess.preset));
    }
  }
  const std::vector<OdeVar> eqs{OdeVar::s, OdeVar::f};
  NewtonResult res;
  res.point = guess;
  HomogeneousRhs r = homogeneous_rhs(res.point);
  res.residual_history.push_back(r.norm());
  while (r.norm() > opt.tol) {
    if (res.iterations >= opt.max_iter) {
      throw ConvergenceError("newton_stationary: no convergence after " + std::to_string(opt.max_iter) +
                             " iterations (|rhs| = " + std::to_string(r.norm()) + ")");
    }
    const Eigen::MatrixXd J = jacobian(res.point, eqs, free, opt.fd_step);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(J);
    qr.setThreshold(1e-12);
    if (qr.rank() < static_cast<Eigen::Index>(free.size())) {
      throw SingularJacobianError("newton_stationary: singular Jacobian at iteration " + std::to_string(res.iterations));
    }
    const Eigen::Vector2d rv(r.ds, r.df);
    const Eigen::VectorXd delta = qr.solve(rv);
    for (std::size_t j = 0; j < free.size(); ++j) var_ref(res.point, free[j]) -= delta(j);
    if (!(res.point.s > 0.0) || !std::isfinite(res.point.s)) {
      throw ConvergenceError("newton_stationary: iterate left the positive-scale region");
    }
    r = homogeneous_rhs(res.point);
    res.residual_history.push_back(r.norm());
    ++res.iterations;
  }
  res.rhs_norm = r.norm();
  res.spectrum = linearization_spectrum(res.point, opt.fd_step);
  const SymTensorField ric = base_ricci(res.point);
  const ReducedFieldResidual fr = field_equation_residual(to_reduced_state(res.point), &ric);
  res.r1_sup = fr.r1_sup;
  res.r2_sup = fr.r2_sup;
  res.certified = res.rhs_norm <= opt.tol && res.r1_sup <= 1e-10 && res.r2_sup <= 1e-10;
  return res;
}

HomogeneousState ode_step(const HomogeneousState& h, double dt, Scheme scheme) {
  HomogeneousRhs k1 = homogeneous_rhs(h);
  if (scheme == Scheme::euler) return advance(h, k1, dt);
  const HomogeneousRhs k2 = homogeneous_rhs(advance(h, k1, 0.5 * dt));
  const HomogeneousRhs k3 = homogeneous_rhs(advance(h, k2, 0.5 * dt));
  const HomogeneousRhs k4 = homogeneous_rhs(advance(h, k3, dt));
  HomogeneousRhs k{k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds, k1.df + 2.0 * k2.df + 2.0 * k3.df + k4.df,
                   k1.db + 2.0 * k2.db + 2.0 * k3.db + k4.db, k1.dc + 2.0 * k2.dc + 2.0 * k3.dc + k4.dc};
  HomogeneousState out = advance(h, k, dt / 6.0);
  out.t = h.t + dt;
  return out;
}

namespace {

struct OdeMonitor {
  double total = 0.0;
  std::string dominant;
  bool ok = true;
};

OdeMonitor monitor(const HomogeneousState& h, double k_max) {
  OdeMonitor m;
  const double parts[] = {std::abs(h.f), std::abs(h.b), std::abs(h.c) / (h.s * h.s)};
  const char* names[] = {"f", "beta", "psi"};
  double best = -1.0;
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(parts[i])) {
      m.ok = false;
      m.dominant = names[i];
      m.total = std::numeric_limits<double>::infinity();
      return m;
    }
    m.total += parts[i];
    if (parts[i] > best) {
      best = parts[i];
      m.dominant = names[i];
    }
  }
  m.ok = m.total <= k_max;
  return m;
}

}  // namespace

OdeTrajectory integrate_ode(const HomogeneousState& init, const OdeOptions& opt) {
  init.validate();
  if (!(opt.dt > 0.0)) throw ConfigError("/flow/dt", "ODE integration needs dt > 0");
  if (opt.cadence < 1) throw ConfigError("/flow/cadence", "must be >= 1");
  OdeTrajectory tr;
  HomogeneousState cur = init;
  double dt = opt.dt;
  const double t_stop = init.t + opt.t_end;
  const double t_tol = 1e-12 * std::max(1.0, std::abs(t_stop));
  long last = -1;
  auto emit = [&](long n) {
    if (last != n) tr.samples.push_back({cur.t, cur, homogeneous_rhs(cur)});
    last = n;
  };
  emit(0);
  while (cur.t < t_stop - t_tol) {
    const double h = std::min(dt, t_stop - cur.t);
    HomogeneousState next;
    OdeMonitor mon;
    Termination failure = Termination::blow_up;
    bool ok = false;
    try {
      next = ode_step(cur, h, opt.scheme);
      if (!(next.s > 0.0)) {
        failure = Termination::positivity_lost;
        mon.dominant = "metric";
      } else {
        mon = monitor(next, opt.k_max);
        ok = mon.ok;
      }
    } catch (const ConfigError&) {
      failure = Termination::positivity_lost;
      mon.dominant = "metric";
    }
    if (!ok) {
      if (tr.halvings >= opt.max_halvings) {
        tr.cause = failure;
        tr.quantity = mon.dominant;
        tr.quantity_value = mon.total;
        break;
      }
      ++tr.halvings;
      dt *= 0.5;
      continue;
    }
    if (std::abs(next.t - t_stop) <= t_tol) next.t = t_stop;
    cur = next;
    ++tr.steps;
    if (tr.steps % opt.cadence == 0) emit(tr.steps);
  }
  emit(tr.steps);
  tr.t = cur.t;
  tr.final_state = cur;
  return tr;
}

}  // namespace sgflow
