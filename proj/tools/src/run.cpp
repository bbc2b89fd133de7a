#include "sgflow_app/run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <ostream>

#include "sgflow/diagnostics.hpp"
#include "sgflow/error.hpp"
#include "sgflow/io.hpp"
#include "sgflow/ode.hpp"
#include "sgflow_app/initial.hpp"
#include "sgflow_app/verify.hpp"

namespace sgflow::app {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr double kClosedTol = 1e-10;

std::string path_in(const RunConfig& c, const std::string& name) { return (fs::path(c.output.dir) / name).string(); }

void prepare_output(const RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.output.dir, ec);
  if (ec) throw IoError(c.output.dir, ec.message());
}

DiagnosticsOptions diagnostics_options(const RunConfig& c) {
  DiagnosticsOptions o;
  o.curvature = c.diagnostics.curvature;
  o.field_equations = c.diagnostics.field_equations;
  o.alpha = c.diagnostics.alpha;
  o.shi = c.diagnostics.shi;
  o.action = c.diagnostics.action;
  o.constants = c.flow.shi;
  return o;
}

template <class State>
ojson result_json(const RunResult<State>& r) {
  ojson hist = ojson::array();
  for (const auto& [t, dt] : r.dt_history) hist.push_back({t, dt});
  return ojson{{"cause", to_string(r.cause)},
               {"t", r.t},
               {"steps", r.steps},
               {"quantity", r.quantity.empty() ? ojson(nullptr) : ojson(r.quantity)},
               {"quantity_value", r.quantity_value},
               {"halvings", r.halvings},
               {"dt_cfl", std::isfinite(r.dt_cfl) ? ojson(r.dt_cfl) : ojson(nullptr)},
               {"cfl_exceeded", r.cfl_exceeded},
               {"dt_history", hist}};
}

ojson timing_json(Clock::time_point t0) {
  return ojson{{"wall_seconds", std::chrono::duration<double>(Clock::now() - t0).count()}};
}

ojson closed_violation(long step, double t, const char* field, double value) {
  return ojson{{"step", step}, {"t", t}, {"field", field}, {"value", value}, {"tolerance", kClosedTol}};
}

bool all_zero(const DifferentialForm& a) {
  for (double v : a.raw())
    if (v != 0.0) return false;
  return true;
}

std::string checkpoint_name(long step) { return "checkpoint_" + std::to_string(step) + ".sgck"; }

template <class State>
void finish_flow(const RunConfig& c, const RunResult<State>& res, ojson violations, long records,
                 Clock::time_point t0, std::ostream& log, int code) {
  write_checkpoint(path_in(c, "final.sgck"), res.final_state);
  ojson summary{{"config", to_json(c)},
                {"result", result_json(res)},
                {"records", records},
                {"violations", std::move(violations)},
                {"exit_code", code}};
  if (c.output.timing) summary["timing"] = timing_json(t0);
  write_json(path_in(c, "summary.json"), summary);
  log << to_string(c.mode) << " run: " << to_string(res.cause) << " at t = " << res.t << " after " << res.steps
      << " steps";
  if (!res.quantity.empty()) log << " (" << res.quantity << " = " << res.quantity_value << ")";
  log << "\n";
}

int run_reduced(const RunConfig& c, std::ostream& log) {
  const auto t0 = Clock::now();
  const ReducedState init = build_reduced_state(c);
  const DiagnosticsOptions opt = diagnostics_options(c);
  const RhsFunction<ReducedState, ReducedRhs> rhs = make_rhs(init, c.flow);
  const bool heat = (init.beta.empty() || all_zero(init.beta)) && (init.psi.empty() || all_zero(init.psi)) &&
                    init.factor.lambda == 0.0;
  JsonlWriter out(path_in(c, "diagnostics.jsonl"), c.output.timing);
  std::vector<ExtremumSample> samples;
  ojson closed = ojson::array();
  const auto observe = [&](const ReducedState& s, long step, double dt) {
    const DiagnosticsRecord r = make_record(s, step, dt, opt, &rhs);
    out.write(r);
    if (r.closed_beta && *r.closed_beta > kClosedTol) closed.push_back(closed_violation(step, s.t, "beta", *r.closed_beta));
    if (r.closed_psi && *r.closed_psi > kClosedTol) closed.push_back(closed_violation(step, s.t, "psi", *r.closed_psi));
    if (heat) samples.push_back(extremum_sample(s.f, step, s.t));
    if (c.output.checkpoint_every > 0 && step % c.output.checkpoint_every == 0)
      write_checkpoint(path_in(c, checkpoint_name(step)), s);
  };
  const RunResult<ReducedState> res = run_flow(init, c.flow, observe);
  ojson mp = ojson::array();
  if (heat && !res.dt_history.empty()) {
    const double h = init.ghat.grid().min_spacing();
    for (const ExtremumViolation& v :
         extremum_monitor(samples, res.dt_history.back().second, std::isfinite(h) ? h : 0.0)) {
      mp.push_back({{"step", v.step}, {"t", v.t}, {"kind", v.kind}, {"change", v.change}, {"tolerance", v.tolerance}});
    }
  }
  ojson violations{{"closedness", closed}, {"maximum_principle", heat ? mp : ojson(nullptr)}};
  const int code = exit_code(res.cause);
  finish_flow(c, res, std::move(violations), out.lines(), t0, log, code);
  return code;
}

int run_euclidean(const RunConfig& c, std::ostream& log) {
  const auto t0 = Clock::now();
  const EuclideanState init = build_euclidean_state(c);
  const DiagnosticsOptions opt = diagnostics_options(c);
  const RhsFunction<EuclideanState, EuclideanRhs> rhs = make_rhs(init, c.flow);
  JsonlWriter out(path_in(c, "diagnostics.jsonl"), c.output.timing);
  ojson closed = ojson::array();
  const auto observe = [&](const EuclideanState& s, long step, double dt) {
    const DiagnosticsRecord r = make_record(s, step, dt, opt, &rhs);
    out.write(r);
    if (r.closed_F && *r.closed_F > kClosedTol) closed.push_back(closed_violation(step, s.t, "F", *r.closed_F));
    if (c.output.checkpoint_every > 0 && step % c.output.checkpoint_every == 0)
      write_checkpoint(path_in(c, checkpoint_name(step)), s);
  };
  const RunResult<EuclideanState> res = run_flow(init, c.flow, observe);
  const int code = exit_code(res.cause);
  finish_flow(c, res, ojson{{"closedness", closed}, {"maximum_principle", nullptr}}, out.lines(), t0, log, code);
  return code;
}

int run_ode(const RunConfig& c, std::ostream& log) {
  const auto t0 = Clock::now();
  const HomogeneousState init = build_homogeneous_state(c);
  ojson summary{{"config", to_json(c)}, {"initial", to_json(init)}};
  int code = kExitOk;
  if (c.ode.task == "newton") {
    std::vector<OdeVar> free;
    for (const std::string& v : c.ode.free) free.push_back(parse_ode_var(v));
    try {
      const NewtonResult n = newton_stationary(init, free, NewtonOptions{c.ode.tol, c.ode.max_iter, 1e-6});
      code = n.certified ? kExitOk : kExitNoConvergence;
      summary["newton"] = to_json(n);
      log << "newton: " << n.iterations << " iterations, |rhs| = " << n.rhs_norm << ", r1 = " << n.r1_sup
          << ", r2 = " << n.r2_sup << (n.certified ? ", certified" : ", not certified") << "\n";
    } catch (const ConvergenceError& e) {
      code = kExitNoConvergence;
      summary["newton"] = ojson{{"error", e.what()}};
      log << "newton: " << e.what() << "\n";
    }
    summary["exit_code"] = code;
    if (c.output.timing) summary["timing"] = timing_json(t0);
    write_json(path_in(c, "stationary.json"), summary);
    return code;
  }
  OdeOptions o;
  o.dt = c.ode.dt;
  o.t_end = c.flow.t_end;
  o.scheme = c.flow.scheme;
  o.k_max = c.flow.k_max;
  o.cadence = c.flow.cadence;
  o.max_halvings = c.flow.max_halvings;
  const OdeTrajectory tr = integrate_ode(init, o);
  write_trajectory_csv(path_in(c, "trajectory.csv"), tr);
  code = exit_code(tr.cause);
  summary["result"] = ojson{{"cause", to_string(tr.cause)},
                            {"t", tr.t},
                            {"steps", tr.steps},
                            {"quantity", tr.quantity.empty() ? ojson(nullptr) : ojson(tr.quantity)},
                            {"quantity_value", tr.quantity_value},
                            {"halvings", tr.halvings},
                            {"samples", tr.samples.size()}};
  summary["final"] = to_json(tr.final_state);
  summary["exit_code"] = code;
  if (c.output.timing) summary["timing"] = timing_json(t0);
  write_json(path_in(c, "summary.json"), summary);
  log << "ode run: " << to_string(tr.cause) << " at t = " << tr.t << " after " << tr.steps << " steps\n";
  return code;
}

int run_verify(const RunConfig& c, std::ostream& log) {
  const SuiteOptions opt{c.verify.seed, c.verify.full};
  ojson results = ojson::array();
  bool ok = true;
  for (int id = 1; id <= kCriteria; ++id) {
    const CriterionResult r = run_criterion(id, opt);
    log << format_line(r) << std::endl;
    ok = ok && r.as_expected();
    ojson checks = ojson::array();
    for (const Check& k : r.checks)
      checks.push_back({{"name", k.name}, {"pass", k.pass}, {"expected_failure", k.expected_failure}, {"detail", k.detail}});
    ojson item{{"criterion", r.id}, {"title", r.title}, {"pass", r.pass()}, {"checks", checks}};
    if (c.output.timing) item["timing"] = ojson{{"wall_seconds", r.seconds}};
    results.push_back(item);
  }
  write_json(path_in(c, "verify.json"), ojson{{"config", to_json(c)}, {"criteria", results}, {"as_expected", ok}});
  return ok ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int exit_code(Termination t) {
  switch (t) {
    case Termination::t_end_reached: return kExitOk;
    case Termination::blow_up: return kExitBlowUp;
    case Termination::positivity_lost: return kExitPositivityLost;
    case Termination::cfl_violation: return kExitCfl;
  }
  return kExitConfig;
}

int run_command(const RunConfig& cfg, std::ostream& log) {
  validate(cfg);
  prepare_output(cfg);
  switch (cfg.mode) {
    case Mode::reduced: return run_reduced(cfg, log);
    case Mode::euclidean: return run_euclidean(cfg, log);
    case Mode::ode: return run_ode(cfg, log);
    case Mode::verify: return run_verify(cfg, log);
  }
  return kExitConfig;
}

}  // namespace sgflow::app
