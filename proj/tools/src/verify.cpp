#include "sgflow_app/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "sgflow/diagnostics.hpp"
#include "sgflow/error.hpp"
#include "sgflow/forms.hpp"
#include "sgflow/geometry.hpp"
#include "sgflow/io.hpp"
#include "sgflow/lorentzian.hpp"
#include "sgflow/ode.hpp"
#include "sgflow/reductions.hpp"
#include "sgflow_app/initial.hpp"

#include <unistd.h>

namespace sgflow::app {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }

Check check(std::string name, bool pass, std::string detail) { return Check{std::move(name), pass, std::move(detail), false}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_abs(const GridData& a) {
  double m = 0.0;
  for (double v : a.raw()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const GridData& a, const GridData& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.raw().size(); ++i) m = std::max(m, std::abs(a.raw()[i] - b.raw()[i]));
  return m;
}

DifferentialForm random_form(const GridSpec& grid, int degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DifferentialForm f(grid, degree);
  for (double& v : f.raw()) v = u(rng);
  return f;
}

/// Random symmetric positive-definite constant metric, eigenvalues in [0.5, 2].
MetricField random_constant_metric(const GridSpec& grid, std::mt19937_64& rng) {
  const int n = grid.dim();
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  std::vector<double> B(n * n);
  for (double& b : B) b = u(rng);
  SymTensorField t(grid);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double v = i == j ? 0.7 : 0.0;
      for (int k = 0; k < n; ++k) v += B[i * n + k] * B[j * n + k];
      std::fill_n(t.component(i, j), grid.size(), v);
    }
  }
  return MetricField(std::move(t));
}

GridSpec reduced_grid(int p, int resolved, int points, double length = 1.0) {
  const int n = 10 - p;
  std::vector<int> shape(n, 1);
  std::vector<double> len(n, length);
  for (int a = 0; a < std::min(resolved, n); ++a) shape[a] = points;
  return GridSpec(shape, len);
}

ReducedState smooth_reduced(int p, const GridSpec& grid, int sigma, double lambda, std::uint64_t seed, double amp,
                            int max_mode, bool closed = true) {
  ReducedState s = ReducedState::vacuum(grid, EinsteinFactor{p + 1, sigma, lambda});
  s.ghat = smooth_metric(grid, amp, seed, max_mode);
  s.f = smooth_scalar(grid, amp, seed + 1, max_mode);
  if (closed) {
    s.beta = smooth_closed_form(grid, 3 - p, amp, seed + 2, max_mode);
    s.psi = smooth_closed_form(grid, 4, amp, seed + 3, max_mode);
  } else {
    s.beta = smooth_form(grid, 3 - p, amp, seed + 2, max_mode);
    s.psi = smooth_form(grid, 4, amp, seed + 3, max_mode);
  }
  return s;
}

// 1. Closedness preservation under the reduced flow.
struct ClosedRun {
  double closed = 0.0;
  Termination cause = Termination::t_end_reached;
  long steps = 0;
  double seconds = 0.0;
};

ClosedRun closedness_run(const ReducedState& init, long steps, int cadence) {
  const auto t0 = std::chrono::steady_clock::now();
  FlowConfig cfg;
  cfg.dt = 0.9 * cfl_limit(init.ghat, cfg.c_cfl);
  cfg.t_end = cfg.dt * static_cast<double>(steps);
  cfg.cadence = cadence;
  cfg.curvature_every = cadence;
  ClosedRun r;
  const auto observe = [&](const ReducedState& s, long, double) {
    if (!s.beta.empty()) r.closed = std::max(r.closed, max_abs(exterior_derivative(s.beta)));
    if (!s.psi.empty()) r.closed = std::max(r.closed, max_abs(exterior_derivative(s.psi)));
  };
  const RunResult<ReducedState> res = run_flow(init, cfg, observe);
  r.cause = res.cause;
  r.steps = res.steps;
  r.seconds = seconds_since(t0);
  return r;
}

CriterionResult criterion1(const SuiteOptions& o) {
  CriterionResult r{1, "closedness of beta and Psi along the reduced flow", {}, 0.0};
  const long steps = o.full ? 1000 : 100;
  const int cadence = 100;
  struct Case {
    std::string name;
    ReducedState init;
    long steps;
    /// Counted against the runtime budget.
    bool timed;
  };
  // At p = 7 and p = 6 the form content is trivially closed (no β, top-degree
  // Ψ); the p = 2 case carries a 1-form β and a 4-form Ψ on an 8-dimensional
  // base where dβ and dΨ are genuinely constrained.
  std::vector<Case> cases;
  cases.push_back({"p=7 16^3 metric and warp", smooth_reduced(7, reduced_grid(7, 3, 16), 1, 0.5, o.seed, 0.1, 1), steps, true});
  cases.push_back({"p=6 12^4 with Psi", smooth_reduced(6, reduced_grid(6, 4, 12), 1, -0.5, o.seed + 10, 0.1, 1), steps, true});
  cases.push_back({"p=2 8^2x1^6 with beta and Psi", smooth_reduced(2, reduced_grid(2, 2, 8), 1, 0.0, o.seed + 20, 0.1, 1),
                   steps / 4, false});
  double timed = 0.0;
  for (Case& c : cases) {
    const ClosedRun cr = closedness_run(c.init, c.steps, cadence);
    if (c.timed) timed += cr.seconds;
    const bool ok = cr.cause == Termination::t_end_reached && cr.steps == c.steps && cr.closed <= 1e-10;
    r.checks.push_back(check(c.name, ok,
                             "sup|d beta|,|d Psi| = " + sci(cr.closed) + " over " + std::to_string(cr.steps) +
                                 " RK4 steps (" + to_string(cr.cause) + ", " + fmt("%.1f s", cr.seconds) + ")"));
  }
  if (o.full) r.checks.push_back(check("runtime of the p=7 and p=6 runs", timed < 120.0, fmt("%.1f s (target < 120 s)", timed)));
  return r;
}

// 2. Discrete calculus identities.
CriterionResult criterion2(const SuiteOptions& o) {
  CriterionResult r{2, "discrete calculus identities", {}, 0.0};
  std::mt19937_64 rng(o.seed);

  double dd = 0.0;
  for (int n = 1; n <= 5; ++n) {
    const GridSpec grid = GridSpec::cube(n, n >= 4 ? 6 : 12);
    for (int k = 0; k <= n; ++k) dd = std::max(dd, max_abs(exterior_derivative(exterior_derivative(random_form(grid, k, rng)))));
  }
  r.checks.push_back(check("d(d a) = 0", dd <= 1e-13, "max " + sci(dd) + " (n = 1..5, all degrees)"));

  double law_err = 0.0;
  std::string middle_detail;
  double middle_err = 0.0;
  for (int n = 1; n <= 6; ++n) {
    const GridSpec grid = GridSpec::cube(n, 4);
    const MetricField g = smooth_metric(grid, 0.2, o.seed + n);
    for (int k = 0; k <= n; ++k) {
      const DifferentialForm a = random_form(grid, k, rng);
      for (int sigma : {-1, 1}) {
        DifferentialForm expect = a;
        expect *= -sigma * (((k * (n - k)) % 2) ? -1.0 : 1.0);
        const double e = max_abs_diff(hodge_star(g, sigma, hodge_star(g, sigma, a)), expect) / std::max(1.0, max_abs(a));
        if (sigma == 1 && 2 * k == n) {
          middle_err = std::max(middle_err, e);
          if (e > 1e-12) middle_detail += (middle_detail.empty() ? "" : ", ") + std::string("(n=") + std::to_string(n) + ",k=" + std::to_string(k) + ")";
        } else {
          law_err = std::max(law_err, e);
        }
      }
    }
  }
  r.checks.push_back(check("star star = -sigma (-1)^{k(n-k)} off the Lorentzian middle degree", law_err <= 1e-12,
                           "max " + sci(law_err) + " (n = 1..6, both sigma)"));
  Check mid = check("star star = -sigma (-1)^{k(n-k)} at sigma=+1, k=n/2", middle_err <= 1e-12,
                    middle_detail.empty() ? "max " + sci(middle_err)
                                          : "violated at " + middle_detail + ": a real star has star star = +(-1)^{k^2} there");
  mid.expected_failure = true;
  r.checks.push_back(mid);

  double adj = 0.0;
  for (int n = 1; n <= 4; ++n) {
    const GridSpec grid = GridSpec::cube(n, n == 4 ? 6 : 8);
    const MetricField g = random_constant_metric(grid, rng);
    for (int k = 0; k < n; ++k) {
      const DifferentialForm a = random_form(grid, k, rng);
      const DifferentialForm b = random_form(grid, k + 1, rng);
      adj = std::max(adj, std::abs(inner_product(g, exterior_derivative(a), b) - inner_product(g, a, codifferential(g, b))));
    }
  }
  r.checks.push_back(check("<d a, b> = <a, d^dagger b> on flat metrics", adj <= 1e-12, "max " + sci(adj)));

  double tr_err = 0.0;
  long violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 10);
    const int k = 1 + static_cast<int>(rng() % n);
    const GridSpec grid = GridSpec::homogeneous(n);
    const MetricField g = random_constant_metric(grid, rng);
    const DifferentialForm F = random_form(grid, k, rng);
    const FormSquare fs = form_square(g, F);
    const double nf = fs.normsq[0];
    const double tr = trace(g, fs.sq)[0];
    tr_err = std::max(tr_err, std::abs(tr - k * nf) / std::max(1.0, nf));
    const double sq = std::pow(symmetric_norm(g, fs.sq)[0], 2);
    if (sq < static_cast<double>(k) * k / n * nf * nf * (1.0 - 1e-12)) ++violations;
  }
  r.checks.push_back(check("trace_g(F^2) = k|F|^2", tr_err <= 1e-12, "max relative " + sci(tr_err) + " over 1000 random forms"));
  r.checks.push_back(check("|F^2|^2 >= (k^2/n)|F|^4", violations == 0,
                           std::to_string(violations) + " violations over 1000 random forms (n = 1..10)"));
  return r;
}

// 3. Conformal squares of Lorentzian forms.
double conformal_defect(const LorentzianAlgebraForm& a) {
  const int d = a.dim();
  const std::vector<double> sq = a.square();
  double c = 0.0;
  for (int i = 0; i < d; ++i) c += sq[i * d + i] * LorentzianAlgebraForm::metric(i);
  c /= d;
  double num = 0.0, norm = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double t = sq[i * d + j] - (i == j ? c * LorentzianAlgebraForm::metric(i) : 0.0);
      num += t * t;
    }
  for (double x : a.coefficients()) norm += x * x;
  return std::sqrt(num) / norm;
}

CriterionResult criterion3(const SuiteOptions& o) {
  CriterionResult r{3, "no nonzero intermediate-degree Lorentzian form has a conformal square", {}, 0.0};
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (auto [d, j] : {std::pair{3, 1}, std::pair{3, 2}, std::pair{4, 2}}) {
    long found = 0;
    double min_defect = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 1000; ++trial) {
      LorentzianAlgebraForm a(d, j);
      for (double& x : a.coefficients()) x = nd(rng);
      // Local random search toward a conformal square from each start.
      double best = conformal_defect(a);
      double step = 0.3;
      for (int it = 0; it < 60; ++it) {
        LorentzianAlgebraForm b = a;
        for (double& x : b.coefficients()) x += step * nd(rng);
        const double db = conformal_defect(b);
        if (db < best) {
          best = db;
          a = b;
        } else {
          step *= 0.93;
        }
      }
      double norm = 0.0;
      for (double x : a.coefficients()) norm += x * x;
      for (double& x : a.coefficients()) x /= std::sqrt(norm);
      if (proposition1_check(d, a, 1e-10).forced_trivial) ++found;
      min_defect = std::min(min_defect, best);
    }
    r.checks.push_back(check("(p+1, j) = (" + std::to_string(d) + ", " + std::to_string(j) + ")", found == 0 && min_defect > 1e-6,
                             std::to_string(found) + " conformal nonzero forms in 1000 searches, smallest relative defect " +
                                 sci(min_defect)));
  }
  bool volume_ok = true, const_ok = true;
  for (int d : {3, 4}) {
    const ConformalVerdict v = proposition1_check(d, LorentzianAlgebraForm::volume(d, 1.7));
    volume_ok = volume_ok && v.conformal && !v.forced_trivial;
    const ConformalVerdict c = proposition1_check(d, LorentzianAlgebraForm(d, 0, {2.5}));
    const_ok = const_ok && c.conformal && !c.forced_trivial;
  }
  r.checks.push_back(check("volume forms are conformal", volume_ok, volume_ok ? "dims 3, 4" : "volume form rejected"));
  r.checks.push_back(check("constant 0-forms are conformal", const_ok, const_ok ? "dims 3, 4" : "constant rejected"));
  return r;
}

// 4. Lift consistency.
ReducedState random_point_state(int p, int sigma, std::mt19937_64& rng) {
  const GridSpec grid = GridSpec::homogeneous(10 - p);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  ReducedState s = ReducedState::vacuum(grid, EinsteinFactor{p + 1, sigma, 2.0 * u(rng)});
  s.ghat = random_constant_metric(grid, rng);
  for (double& v : s.f.raw()) v = u(rng);
  s.beta = random_form(grid, 3 - p, rng);
  s.psi = random_form(grid, 4, rng);
  return s;
}

CriterionResult criterion4(const SuiteOptions& o) {
  CriterionResult r{4, "lift consistency of the reduced flow", {}, 0.0};
  std::mt19937_64 rng(o.seed);
  for (int p : {3, 6, 7}) {
    for (int sigma : {1, -1}) {
      LiftReport worst;
      for (int trial = 0; trial < 20; ++trial) {
        const LiftReport l = lift_consistency_check(random_point_state(p, sigma, rng));
        worst.g_ab = std::max(worst.g_ab, l.g_ab);
        worst.g_ij = std::max(worst.g_ij, l.g_ij);
        worst.F_beta = std::max(worst.F_beta, l.F_beta);
        worst.F_psi = std::max(worst.F_psi, l.F_psi);
      }
      r.checks.push_back(check("derivative-free p=" + std::to_string(p) + " sigma=" + (sigma > 0 ? "+1" : "-1"),
                               worst.max() <= 1e-12,
                               "g_ab " + sci(worst.g_ab) + ", g_ij " + sci(worst.g_ij) + ", F_beta " + sci(worst.F_beta) +
                                   ", F_Psi " + sci(worst.F_psi)));
    }
  }
  const std::vector<int> ladder{32, 64, 128};
  for (int p : {3, 6, 7}) {
    for (int sigma : {1, -1}) {
      std::vector<double> e;
      for (int N : ladder) {
        e.push_back(lift_consistency_check(smooth_reduced(p, reduced_grid(p, 2, N), sigma, 0.5, o.seed + p, 0.2, 1)).max());
      }
      const double o1 = std::log2(e[0] / e[1]), o2 = std::log2(e[1] / e[2]);
      const bool ok = std::abs(o1 - 2.0) <= 0.2 && std::abs(o2 - 2.0) <= 0.2;
      r.checks.push_back(check("smooth p=" + std::to_string(p) + " sigma=" + (sigma > 0 ? "+1" : "-1"), ok,
                               "residuals " + sci(e[0]) + ", " + sci(e[1]) + ", " + sci(e[2]) + " at N = " +
                                   std::to_string(ladder[0]) + ", " + std::to_string(ladder[1]) + ", " +
                                   std::to_string(ladder[2]) + "; orders " + fmt("%.3f", o1) + ", " + fmt("%.3f", o2)));
    }
  }
  return r;
}

// 5. Curvature oracle.
double gaussian_error(int N) {
  const double amp = 0.1;
  const GridSpec grid = GridSpec::cube(2, N);
  SymTensorField t(grid);
  ScalarField u(grid);
  for (std::size_t q = 0; q < grid.size(); ++q) {
    u[q] = amp * std::sin(kTwoPi * grid.coordinate(q, 0)) * std::sin(kTwoPi * grid.coordinate(q, 1));
    t.component(0, 0)[q] = t.component(1, 1)[q] = std::exp(2.0 * u[q]);
  }
  const CurvatureBundle cb = curvature_suite(MetricField(std::move(t)));
  double err = 0.0;
  for (std::size_t q = 0; q < grid.size(); ++q) {
    // K = -e^{-2u} Δu with Δu = -8π² u.
    const double K = std::exp(-2.0 * u[q]) * 2.0 * kTwoPi * kTwoPi * u[q];
    err = std::max(err, std::abs(0.5 * cb.scalar[q] - K));
  }
  return err;
}

CriterionResult criterion5(const SuiteOptions& o) {
  CriterionResult r{5, "curvature of conformal and flat metrics", {}, 0.0};
  const double e1 = gaussian_error(16), e2 = gaussian_error(32), e3 = gaussian_error(64);
  const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
  r.checks.push_back(check("Gaussian curvature of e^{2u} delta", std::abs(o1 - 2.0) <= 0.2 && std::abs(o2 - 2.0) <= 0.2,
                           "errors " + sci(e1) + ", " + sci(e2) + ", " + sci(e3) + " at N = 16, 32, 64; orders " +
                               fmt("%.3f", o1) + ", " + fmt("%.3f", o2)));
  std::mt19937_64 rng(o.seed);
  double rm = 0.0;
  for (int n = 1; n <= 5; ++n) {
    const CurvatureBundle cb = curvature_suite(random_constant_metric(GridSpec::cube(n, n >= 4 ? 4 : 6), rng));
    rm = std::max(rm, std::sqrt(std::max(0.0, cb.norm_rm.max())));
  }
  r.checks.push_back(check("flat metrics have |Rm| = 0", rm <= 1e-12, "max |Rm| " + sci(rm) + " (constant metrics, n = 1..5)"));
  return r;
}

// 6. Blow-up criterion.
CriterionResult criterion6(const SuiteOptions&) {
  CriterionResult r{6, "finite-time blow-up of the homogeneous warp", {}, 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  FlowConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  cfg.gauge = Gauge::none;
  ReducedState s = ReducedState::vacuum(GridSpec::homogeneous(3), EinsteinFactor{8, 1, 1.0});
  double f_last = 0.0;
  const RunResult<ReducedState> up = run_flow(s, cfg, [&](const ReducedState& x, long, double) { f_last = x.f[0]; });
  const bool blew = up.cause == Termination::blow_up && up.quantity == "f";
  const bool timing_ok = std::abs(up.t - 0.5) <= 0.02 * 0.5;
  const bool diverging = std::abs(f_last) > 10.0;
  r.checks.push_back(check("lambda=+1, f0=0 blows up at t = 1/2", blew && timing_ok && diverging,
                           to_string(up.cause) + " in " + (up.quantity.empty() ? "-" : up.quantity) + " at t = " +
                               fmt("%.6f", up.t) + ", last |f| = " + fmt("%.2f", std::abs(f_last)) + ", " +
                               std::to_string(up.halvings) + " dt halvings"));
  s.factor.lambda = -1.0;
  const RunResult<ReducedState> down = run_flow(s, cfg);
  const double err = std::abs(down.final_state.f[0] - std::log(3.0));
  r.checks.push_back(check("lambda=-1 reaches t = 1 on log(1 + 2t)",
                           down.cause == Termination::t_end_reached && down.t == 1.0 && err <= 1e-6,
                           "error " + sci(err) + " at t = " + fmt("%.6f", down.t)));
  const double secs = seconds_since(t0);
  r.checks.push_back(check("runtime", secs < 5.0, fmt("%.2f s (target < 5 s)", secs)));
  return r;
}

// 7. Freund-Rubin stationary point.
CriterionResult criterion7(const SuiteOptions&) {
  CriterionResult r{7, "Freund-Rubin stationary point by Newton", {}, 0.0};
  const double c = 1.0;
  struct Case {
    const char* name;
    HomogeneousState guess;
    std::vector<OdeVar> free;
  };
  HomogeneousState shape = HomogeneousState::psi_preset(c, c * c / 3.0, -c * c / 6.0);
  shape.s = 1.15;
  shape.f = -0.1;
  const std::vector<Case> cases{
      {"solve (kappa, lambda) at s=1, f=0", HomogeneousState::psi_preset(c, 0.45, 0.1), {OdeVar::kappa, OdeVar::lambda}},
      {"solve (s, f) on the branch", shape, {OdeVar::s, OdeVar::f}}};
  for (const Case& k : cases) {
    try {
      const NewtonResult n = newton_stationary(k.guess, k.free);
      const HomogeneousState& x = n.point;
      // Independent substitution into the constant-field equations.
      const double ds = -2.0 * x.kappa + 2.0 / 3.0 * x.c * x.c / (x.s * x.s * x.s);
      const double df = -x.c * x.c / (3.0 * std::pow(x.s, 4)) - 2.0 * x.lambda * std::exp(-x.f);
      const double branch = std::max({std::abs(x.kappa * x.s - c * c / (3.0 * x.s * x.s)),
                                      std::abs(2.0 * x.lambda * std::exp(-x.f) + c * c / (3.0 * std::pow(x.s, 4)))});
      const double target = (k.free[0] == OdeVar::kappa)
                                ? std::max(std::abs(x.kappa - c * c / 3.0), std::abs(2.0 * x.lambda + c * c / 3.0))
                                : std::max(std::abs(x.s - 1.0), std::abs(x.f));
      const bool ok = n.iterations <= 20 && n.rhs_norm <= 1e-12 && n.r1_sup <= 1e-10 && n.r2_sup <= 1e-10 &&
                      std::max(std::abs(ds), std::abs(df)) <= 1e-12 && branch <= 1e-10 && target <= 1e-10;
      std::string spec;
      for (const auto& e : n.spectrum) spec += (spec.empty() ? "" : ", ") + fmt("%.4f", e.real());
      r.checks.push_back(check(k.name, ok,
                               std::to_string(n.iterations) + " iterations, |rhs| " + sci(n.rhs_norm) + ", r1 " +
                                   sci(n.r1_sup) + ", r2 " + sci(n.r2_sup) + ", kappa " + fmt("%.12f", x.kappa) +
                                   ", lambda " + fmt("%.12f", x.lambda) + ", substitution " +
                                   sci(std::max(std::abs(ds), std::abs(df))) + ", spectrum {" + spec + "}"));
    } catch (const Error& e) {
      r.checks.push_back(check(k.name, false, e.what()));
    }
  }
  return r;
}

// 8. Specialized systems against the general one.
CriterionResult criterion8(const SuiteOptions& o) {
  CriterionResult r{8, "beta-only and Psi-only systems agree with the general system", {}, 0.0};
  double beta_worst = 0.0, psi_worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int sigma = i % 2 ? 1 : -1;
    const int pb = i % 4;
    ReducedState sb = smooth_reduced(pb, reduced_grid(pb, 2, 6), sigma, 0.3 * (i % 5 - 2), o.seed + 7 * i, 0.3, 2, false);
    sb.psi *= 0.0;
    beta_worst = std::max(beta_worst, specialization_check(sb).beta_path.value_or(1.0));
    const int pp = 3 + i % 4;
    ReducedState sp = smooth_reduced(pp, reduced_grid(pp, 2, 6), sigma, 0.3 * (i % 5 - 2), o.seed + 7 * i + 3, 0.3, 2, false);
    sp.beta *= 0.0;
    psi_worst = std::max(psi_worst, specialization_check(sp).psi_path.value_or(1.0));
  }
  r.checks.push_back(check("Psi = 0 path", beta_worst <= 1e-14, "max relative discrepancy " + sci(beta_worst) + " over 100 states (p = 0..3)"));
  r.checks.push_back(check("beta = 0 path", psi_worst <= 1e-14, "max relative discrepancy " + sci(psi_worst) + " over 100 states (p = 3..6)"));
  return r;
}

// 9. Maximum principle for the scalar flow.
CriterionResult criterion9(const SuiteOptions& o) {
  CriterionResult r{9, "maximum principle for the warp function", {}, 0.0};
  const GridSpec grid = GridSpec::cube(2, 32);
  ReducedState s = ReducedState::vacuum(grid, EinsteinFactor{9, 1, 0.0});
  s.ghat = smooth_metric(grid, 0.1, o.seed, 1);
  s.f = smooth_scalar(grid, 0.5, o.seed + 1, 2);
  FlowConfig cfg;
  cfg.dt = 0.9 * cfl_limit(s.ghat, cfg.c_cfl);
  cfg.t_end = 500 * cfg.dt;
  cfg.curvature_every = 100;
  std::vector<ExtremumSample> samples;
  const RunResult<ReducedState> res =
      run_flow(s, cfg, [&](const ReducedState& x, long step, double) { samples.push_back(extremum_sample(x.f, step, x.t)); });
  const auto viol = extremum_monitor(samples, cfg.dt, grid.min_spacing());
  r.checks.push_back(check("500-step run on 32^2", res.cause == Termination::t_end_reached && res.steps == 500 && viol.empty(),
                           std::to_string(viol.size()) + " violations, max f " + fmt("%.6f", samples.front().max) + " -> " +
                               fmt("%.6f", samples.back().max) + ", min f " + fmt("%.6f", samples.front().min) + " -> " +
                               fmt("%.6f", samples.back().min)));
  return r;
}

// 10. Shi-type quantities.
CriterionResult criterion10(const SuiteOptions& o) {
  CriterionResult r{10, "Shi-type derivative bounds for the Euclidean flow", {}, 0.0};
  const GridSpec grid = GridSpec::cube(3, 12);
  const EuclideanState init{smooth_metric(grid, 0.2, o.seed, 1), smooth_closed_form(grid, 2, 0.3, o.seed + 2, 1), 1, 0.0};
  const double t_end = o.full ? 0.1 : 0.02;
  const double limit = cfl_limit(init.g, 0.5);
  const long steps = static_cast<long>(std::ceil(t_end / limit));
  ShiConstants k;
  double g1[2] = {0.0, 0.0};
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("sgflow_shi_" + std::to_string(o.seed) + "_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  DiagnosticsOptions dopt;
  dopt.curvature = dopt.field_equations = dopt.alpha = dopt.action = false;
  dopt.constants = k;
  bool finite = true;
  for (int pass = 0; pass < 2; ++pass) {
    FlowConfig cfg;
    cfg.dt = t_end / static_cast<double>(steps << pass);
    cfg.t_end = t_end;
    cfg.cadence = static_cast<int>(std::max<long>(1, (steps << pass) / 5));
    cfg.curvature_every = cfg.cadence;
    JsonlWriter out((dir / ("shi" + std::to_string(pass) + ".jsonl")).string(), false);
    long idx = 0;
    const auto observe = [&](const EuclideanState& s, long step, double dt) {
      if (pass == 0) {
        out.write(make_record(s, step, dt, dopt));
        write_checkpoint((dir / ("ck" + std::to_string(idx++) + ".sgck")).string(), s);
      }
    };
    const RunResult<EuclideanState> res = run_flow(init, cfg, observe);
    const EuclideanShi shi = shi_quantities(res.final_state, k);
    g1[pass] = shi.G.at(0);
    finite = finite && res.cause == Termination::t_end_reached && std::isfinite(g1[pass]);
  }
  const double drift = std::abs(g1[0] - g1[1]) / std::abs(g1[1]);
  r.checks.push_back(check("G1 finite and stable under dt halving", finite && drift <= 0.05,
                           "G1(t=" + fmt("%.3f", t_end) + ") = " + fmt("%.6e", g1[0]) + " vs " + fmt("%.6e", g1[1]) +
                               ", drift " + fmt("%.3f%%", 100.0 * drift)));
  double worst = 0.0;
  long records = 0;
  std::ifstream in(dir / "shi0.jsonl");
  std::string line;
  while (std::getline(in, line)) {
    const DiagnosticsRecord rec = record_from_json(ojson::parse(line));
    const EuclideanState s = read_euclidean_checkpoint((dir / ("ck" + std::to_string(records) + ".sgck")).string());
    const EuclideanShi shi = shi_quantities(s, k);
    for (std::size_t i = 0; i < shi.G.size(); ++i) {
      const double streamed = rec.shi.at("G" + std::to_string(i + 1));
      worst = std::max(worst, std::abs(streamed - shi.G[i]) / std::max(1.0, std::abs(streamed)));
    }
    ++records;
  }
  fs::remove_all(dir);
  r.checks.push_back(check("checkpoint recomputation of G1..G3", records > 0 && worst <= 1e-12,
                           std::to_string(records) + " checkpoints, max relative difference " + sci(worst)));
  return r;
}

}  // namespace

bool CriterionResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

bool CriterionResult::as_expected() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass != c.expected_failure; });
}

CriterionResult run_criterion(int id, const SuiteOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = criterion1(opt); break;
      case 2: r = criterion2(opt); break;
      case 3: r = criterion3(opt); break;
      case 4: r = criterion4(opt); break;
      case 5: r = criterion5(opt); break;
      case 6: r = criterion6(opt); break;
      case 7: r = criterion7(opt); break;
      case 8: r = criterion8(opt); break;
      case 9: r = criterion9(opt); break;
      case 10: r = criterion10(opt); break;
      default: throw ConfigError("/criterion", "criteria are numbered 1.." + std::to_string(kCriteria));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    r.id = id;
    r.title = "criterion " + std::to_string(id);
    r.checks.push_back(check("completed", false, std::string("exception: ") + e.what()));
  }
  r.seconds = seconds_since(t0);
  return r;
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os << "criterion " << r.id << ": " << (r.pass() ? "PASS" : "FAIL") << "  " << r.title << fmt("  [%.1f s]", r.seconds);
  for (const Check& c : r.checks) {
    os << "\n    " << (c.pass ? "pass" : (c.expected_failure ? "FAIL (expected)" : "FAIL")) << "  " << c.name << ": " << c.detail;
  }
  return os.str();
}

}  // namespace sgflow::app
