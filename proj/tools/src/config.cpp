#include "sgflow_app/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "sgflow/error.hpp"
#include "sgflow/reductions.hpp"

namespace sgflow::app {
namespace {

const char* type_name(const ojson& j) { return j.type_name(); }

/// Reads members of one JSON object, tracking which keys were consumed.
class Obj {
 public:
  Obj(const ojson& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, std::string("expected an object, got ") + type_name(j_));
  }

  std::string at(const char* key) const { return path_ + "/" + key; }

  const ojson* find(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  bool has(const char* key) const { return j_.contains(key); }

  void number(const char* key, double& out) {
    if (const ojson* v = find(key)) {
      if (!v->is_number()) throw ConfigError(at(key), std::string("expected a number, got ") + type_name(*v));
      out = v->get<double>();
    }
  }

  template <class Int>
  void integer(const char* key, Int& out) {
    if (const ojson* v = find(key)) out = as_integer<Int>(*v, at(key));
  }

  void boolean(const char* key, bool& out) {
    if (const ojson* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(at(key), std::string("expected a boolean, got ") + type_name(*v));
      out = v->get<bool>();
    }
  }

  void string(const char* key, std::string& out) {
    if (const ojson* v = find(key)) {
      if (!v->is_string()) throw ConfigError(at(key), std::string("expected a string, got ") + type_name(*v));
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError(path_ + "/" + k, "unknown key");
    }
  }

  template <class Int>
  static Int as_integer(const ojson& v, const std::string& path) {
    if (v.is_number_integer()) return v.get<Int>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::isfinite(d) && d == std::floor(d)) return static_cast<Int>(d);
    }
    throw ConfigError(path, std::string("expected an integer, got ") + (v.is_number() ? "a non-integral number" : type_name(v)));
  }

 private:
  const ojson& j_;
  std::string path_;
  std::set<std::string> seen_;
};

TrigPoly parse_poly(const ojson& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of terms");
  TrigPoly out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "/" + std::to_string(i);
    Obj o(j[i], p);
    TrigTerm t;
    o.number("amplitude", t.amplitude);
    o.number("phase", t.phase);
    if (const ojson* w = o.find("wave")) {
      if (!w->is_array()) throw ConfigError(o.at("wave"), "expected an array of integers");
      for (std::size_t a = 0; a < w->size(); ++a) {
        t.wave.push_back(Obj::as_integer<int>((*w)[a], o.at("wave") + "/" + std::to_string(a)));
      }
    } else {
      throw ConfigError(o.at("wave"), "required");
    }
    o.finish();
    out.push_back(std::move(t));
  }
  return out;
}

std::map<std::string, TrigPoly> parse_poly_map(const ojson& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object keyed by component");
  std::map<std::string, TrigPoly> out;
  for (const auto& [k, v] : j.items()) out[k] = parse_poly(v, path + "/" + k);
  return out;
}

FormSpec parse_form(const ojson& j, const std::string& path) {
  Obj o(j, path);
  FormSpec f;
  if (const ojson* c = o.find("constant")) {
    if (!c->is_object()) throw ConfigError(o.at("constant"), "expected an object keyed by component");
    for (const auto& [k, v] : c->items()) {
      if (!v.is_number()) throw ConfigError(o.at("constant") + "/" + k, "expected a number");
      f.constant[k] = v.get<double>();
    }
  }
  if (const ojson* c = o.find("components")) f.components = parse_poly_map(*c, o.at("components"));
  if (const ojson* c = o.find("potential")) f.potential = parse_poly_map(*c, o.at("potential"));
  o.finish();
  return f;
}

ojson poly_json(const TrigPoly& p) {
  ojson a = ojson::array();
  for (const TrigTerm& t : p) a.push_back(ojson{{"amplitude", t.amplitude}, {"wave", t.wave}, {"phase", t.phase}});
  return a;
}

ojson poly_map_json(const std::map<std::string, TrigPoly>& m) {
  ojson o = ojson::object();
  for (const auto& [k, v] : m) o[k] = poly_json(v);
  return o;
}

ojson form_json(const FormSpec& f) {
  ojson c = ojson::object();
  for (const auto& [k, v] : f.constant) c[k] = v;
  return ojson{{"constant", c}, {"components", poly_map_json(f.components)}, {"potential", poly_map_json(f.potential)}};
}

std::vector<int> parse_indices(const std::string& key, const std::string& path) {
  std::vector<int> idx;
  std::stringstream ss(key);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      idx.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError(path, "component key '" + key + "' must be a comma-separated list of axis indices");
    }
  }
  return idx;
}

void check_poly(const TrigPoly& p, const GridSpec& grid, const std::string& path) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const std::string tp = path + "/" + std::to_string(i) + "/wave";
    if (static_cast<int>(p[i].wave.size()) != grid.dim()) {
      throw ConfigError(tp, "needs one integer per grid axis (" + std::to_string(grid.dim()) + ")");
    }
    for (int a = 0; a < grid.dim(); ++a) {
      if (!grid.resolved(a) && p[i].wave[a] != 0) {
        throw ConfigError(tp + "/" + std::to_string(a), "must be 0 along a homogeneous axis");
      }
    }
  }
}

void check_form_keys(const std::map<std::string, TrigPoly>& m, int degree, const GridSpec& grid, const std::string& path) {
  for (const auto& [k, v] : m) {
    const std::vector<int> idx = parse_indices(k, path + "/" + k);
    if (static_cast<int>(idx.size()) != degree && !(degree == 0 && k.empty())) {
      throw ConfigError(path + "/" + k, "expected " + std::to_string(degree) + " indices");
    }
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] < 0 || idx[i] >= grid.dim() || (i > 0 && idx[i] <= idx[i - 1])) {
        throw ConfigError(path + "/" + k, "indices must be strictly increasing and below the grid dimension");
      }
    }
    check_poly(v, grid, path + "/" + k);
  }
}

void check_form(const FormSpec& f, int degree, const GridSpec& grid, const std::string& path) {
  if (f.empty()) return;
  if (degree < 0 || degree > grid.dim()) {
    throw ConfigError(path, "a form of degree " + std::to_string(degree) + " does not exist on a " +
                                std::to_string(grid.dim()) + "-dimensional base");
  }
  std::map<std::string, TrigPoly> consts;
  for (const auto& [k, v] : f.constant) consts[k];
  check_form_keys(consts, degree, grid, path + "/constant");
  check_form_keys(f.components, degree, grid, path + "/components");
  if (!f.potential.empty() && degree == 0) throw ConfigError(path + "/potential", "a 0-form has no potential");
  check_form_keys(f.potential, degree - 1, grid, path + "/potential");
}

GridSpec make_grid(const GridConfig& g) {
  if (g.shape.size() != g.lengths.size()) throw ConfigError("/grid", "shape and lengths differ in size");
  try {
    return GridSpec(g.shape, g.lengths);
  } catch (const ShapeError& e) {
    throw ConfigError("/grid", e.what());
  }
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::euclidean: return "euclidean";
    case Mode::reduced: return "reduced";
    case Mode::ode: return "ode";
    case Mode::verify: return "verify";
  }
  return "reduced";
}

Mode parse_mode(const std::string& s) {
  if (s == "euclidean") return Mode::euclidean;
  if (s == "reduced") return Mode::reduced;
  if (s == "ode") return Mode::ode;
  if (s == "verify") return Mode::verify;
  throw ConfigError("/mode", "unknown mode '" + s + "' (expected euclidean, reduced, ode or verify)");
}

RunConfig config_from_json(const ojson& j) {
  RunConfig c;
  Obj top(j, "");
  std::string mode;
  if (!top.has("mode")) throw ConfigError("/mode", "required");
  top.string("mode", mode);
  c.mode = parse_mode(mode);
  top.integer("p", c.p);
  top.integer("sigma", c.sigma);
  top.number("lambda", c.lambda);
  top.number("kappa", c.kappa);

  if (const ojson* g = top.find("grid")) {
    Obj o(*g, "/grid");
    GridConfig gc;
    if (const ojson* s = o.find("shape")) {
      if (!s->is_array()) throw ConfigError("/grid/shape", "expected an array of integers");
      for (std::size_t i = 0; i < s->size(); ++i) gc.shape.push_back(Obj::as_integer<int>((*s)[i], "/grid/shape/" + std::to_string(i)));
    } else {
      throw ConfigError("/grid/shape", "required");
    }
    if (const ojson* l = o.find("lengths")) {
      if (!l->is_array()) throw ConfigError("/grid/lengths", "expected an array of numbers");
      for (std::size_t i = 0; i < l->size(); ++i) {
        if (!(*l)[i].is_number()) throw ConfigError("/grid/lengths/" + std::to_string(i), "expected a number");
        gc.lengths.push_back((*l)[i].get<double>());
      }
    } else {
      gc.lengths.assign(gc.shape.size(), 1.0);
    }
    o.finish();
    c.grid = gc;
  }

  if (const ojson* in = top.find("initial")) {
    Obj o(*in, "/initial");
    InitialData& d = c.initial;
    o.string("preset", d.preset);
    o.number("amplitude", d.amplitude);
    o.integer("seed", d.seed);
    o.boolean("psi_only", d.psi_only);
    o.number("metric_scale", d.metric_scale);
    if (const ojson* m = o.find("metric")) d.metric = parse_poly_map(*m, "/initial/metric");
    if (const ojson* f = o.find("f")) d.f = parse_poly(*f, "/initial/f");
    if (const ojson* f = o.find("beta")) d.beta = parse_form(*f, "/initial/beta");
    if (const ojson* f = o.find("psi")) d.psi = parse_form(*f, "/initial/psi");
    if (const ojson* f = o.find("F")) d.F = parse_form(*f, "/initial/F");
    o.integer("F_degree", d.F_degree);
    o.finish();
  }

  if (const ojson* fl = top.find("flow")) {
    Obj o(*fl, "/flow");
    FlowConfig& f = c.flow;
    std::string s;
    if (o.has("scheme")) {
      o.string("scheme", s);
      f.scheme = parse_scheme(s);
    }
    o.number("dt", f.dt);
    o.number("c_cfl", f.c_cfl);
    o.number("t_end", f.t_end);
    if (o.has("gauge")) {
      o.string("gauge", s);
      f.gauge = parse_gauge(s);
    }
    if (o.has("reference")) {
      o.string("reference", s);
      if (s == "initial") f.reference = ReferenceMetric::initial;
      else if (s == "flat") f.reference = ReferenceMetric::flat;
      else throw ConfigError("/flow/reference", "expected 'initial' or 'flat'");
    }
    o.number("k_max", f.k_max);
    o.integer("cadence", f.cadence);
    o.integer("max_halvings", f.max_halvings);
    o.boolean("force", f.force);
    o.boolean("freeze_metric", f.freeze_metric);
    o.integer("curvature_every", f.curvature_every);
    if (const ojson* sh = o.find("shi")) {
      Obj so(*sh, "/flow/shi");
      so.number("A", f.shi.A);
      so.number("A0", f.shi.A0);
      so.number("A1", f.shi.A1);
      so.number("A2", f.shi.A2);
      so.number("B", f.shi.B);
      so.integer("m", f.shi.m);
      if (const ojson* bi = so.find("Bi")) {
        if (!bi->is_array()) throw ConfigError("/flow/shi/Bi", "expected an array of numbers");
        f.shi.Bi.clear();
        for (std::size_t i = 0; i < bi->size(); ++i) {
          if (!(*bi)[i].is_number()) throw ConfigError("/flow/shi/Bi/" + std::to_string(i), "expected a number");
          f.shi.Bi.push_back((*bi)[i].get<double>());
        }
      }
      so.finish();
    }
    o.finish();
  }

  if (const ojson* dg = top.find("diagnostics")) {
    Obj o(*dg, "/diagnostics");
    o.boolean("curvature", c.diagnostics.curvature);
    o.boolean("field_equations", c.diagnostics.field_equations);
    o.boolean("alpha", c.diagnostics.alpha);
    o.boolean("shi", c.diagnostics.shi);
    o.boolean("action", c.diagnostics.action);
    o.finish();
  }

  if (const ojson* od = top.find("ode")) {
    Obj o(*od, "/ode");
    std::string preset;
    if (o.has("preset")) {
      o.string("preset", preset);
      c.ode.preset = parse_preset(preset);
    }
    o.number("s", c.ode.s);
    o.number("f", c.ode.f);
    o.number("b", c.ode.b);
    o.number("c", c.ode.c);
    o.string("task", c.ode.task);
    o.number("dt", c.ode.dt);
    if (const ojson* nw = o.find("newton")) {
      Obj n(*nw, "/ode/newton");
      if (const ojson* fr = n.find("free")) {
        if (!fr->is_array()) throw ConfigError("/ode/newton/free", "expected an array of variable names");
        c.ode.free.clear();
        for (std::size_t i = 0; i < fr->size(); ++i) {
          if (!(*fr)[i].is_string()) throw ConfigError("/ode/newton/free/" + std::to_string(i), "expected a string");
          c.ode.free.push_back((*fr)[i].get<std::string>());
        }
      }
      n.number("tol", c.ode.tol);
      n.integer("max_iter", c.ode.max_iter);
      n.finish();
    }
    o.finish();
  }

  if (const ojson* v = top.find("verify")) {
    Obj o(*v, "/verify");
    o.integer("seed", c.verify.seed);
    o.boolean("full", c.verify.full);
    o.finish();
  }

  if (const ojson* out = top.find("output")) {
    Obj o(*out, "/output");
    o.string("dir", c.output.dir);
    o.boolean("timing", c.output.timing);
    o.integer("checkpoint_every", c.output.checkpoint_every);
    o.finish();
  }
  top.finish();
  validate(c);
  return c;
}

RunConfig parse_config(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

void validate(const RunConfig& c) {
  if (c.p < 0 || c.p > 10) throw ConfigError("/p", "must lie in 0..10");
  if (c.sigma != 1 && c.sigma != -1) throw ConfigError("/sigma", "must be +1 or -1");
  if (!std::isfinite(c.lambda)) throw ConfigError("/lambda", "must be finite");
  if (!std::isfinite(c.kappa)) throw ConfigError("/kappa", "must be finite");
  if (c.kappa != 0.0 && c.mode != Mode::ode) {
    throw ConfigError("/kappa", "only the ode mode uses kappa; grid runs compute the base Ricci tensor");
  }
  c.flow.validate();
  if (c.output.checkpoint_every < 0) throw ConfigError("/output/checkpoint_every", "must be >= 0");
  const InitialData& d = c.initial;
  if (d.preset != "fields" && d.preset != "vacuum" && d.preset != "smooth") {
    throw ConfigError("/initial/preset", "expected 'fields', 'vacuum' or 'smooth'");
  }
  if (!(d.metric_scale > 0.0)) throw ConfigError("/initial/metric_scale", "must be positive");

  if (c.mode == Mode::reduced || c.mode == Mode::euclidean) {
    if (!c.grid) throw ConfigError("/grid", "required for " + to_string(c.mode) + " runs");
    const GridSpec grid = make_grid(*c.grid);
    const int n = grid.dim();
    for (const auto& [k, v] : d.metric) {
      const std::vector<int> idx = parse_indices(k, "/initial/metric/" + k);
      if (idx.size() != 2 || idx[0] < 0 || idx[1] < idx[0] || idx[1] >= n) {
        throw ConfigError("/initial/metric/" + k, "expected 'i,j' with 0 <= i <= j < " + std::to_string(n));
      }
      check_poly(v, grid, "/initial/metric/" + k);
    }
    if (c.mode == Mode::reduced) {
      if (n != 10 - c.p) {
        throw ConfigError("/grid/shape", "a reduced run with p = " + std::to_string(c.p) + " needs " +
                                             std::to_string(10 - c.p) + " base axes, got " + std::to_string(n));
      }
      if (!d.F.empty()) throw ConfigError("/initial/F", "reduced runs take beta and psi, not F");
      check_poly(d.f, grid, "/initial/f");
      check_form(d.beta, 3 - c.p, grid, "/initial/beta");
      check_form(d.psi, 4, grid, "/initial/psi");
      if (d.psi_only) {
        validate_psi_only(c.p);
        if (!d.beta.empty()) throw ConfigError("/initial/beta", "must be empty in a Psi-only run");
      }
    } else {
      if (c.flow.gauge == Gauge::f_gauged) throw ConfigError("/flow/gauge", "f_gauged applies to reduced runs only");
      if (!d.f.empty()) throw ConfigError("/initial/f", "Euclidean runs carry no warp function");
      if (!d.beta.empty() || !d.psi.empty()) throw ConfigError("/initial", "Euclidean runs take F, not beta or psi");
      if (d.psi_only) throw ConfigError("/initial/psi_only", "only meaningful for reduced runs");
      if (d.F_degree < 0 || d.F_degree > n) throw ConfigError("/initial/F_degree", "must lie in 0..n");
      check_form(d.F, d.F_degree, grid, "/initial/F");
    }
  }
  if (c.mode == Mode::ode) {
    HomogeneousState h;
    h.preset = c.ode.preset;
    h.p = c.p;
    h.s = c.ode.s;
    h.f = c.ode.f;
    h.b = c.ode.b;
    h.c = c.ode.c;
    h.kappa = c.kappa;
    h.lambda = c.lambda;
    h.sigma = c.sigma;
    h.validate();
    if (c.ode.task != "integrate" && c.ode.task != "newton") {
      throw ConfigError("/ode/task", "expected 'integrate' or 'newton'");
    }
    if (!(c.ode.dt > 0.0)) throw ConfigError("/ode/dt", "must be positive");
    if (!(c.ode.tol > 0.0)) throw ConfigError("/ode/newton/tol", "must be positive");
    if (c.ode.max_iter < 1) throw ConfigError("/ode/newton/max_iter", "must be >= 1");
    if (c.ode.task == "newton" && c.ode.free.empty()) throw ConfigError("/ode/newton/free", "must not be empty");
    for (const std::string& v : c.ode.free) parse_ode_var(v);
  }
}

ojson to_json(const RunConfig& c) {
  ojson j;
  j["mode"] = to_string(c.mode);
  j["p"] = c.p;
  j["sigma"] = c.sigma;
  j["lambda"] = c.lambda;
  j["kappa"] = c.kappa;
  if (c.grid) j["grid"] = ojson{{"shape", c.grid->shape}, {"lengths", c.grid->lengths}};
  const InitialData& d = c.initial;
  j["initial"] = ojson{{"preset", d.preset},
                       {"amplitude", d.amplitude},
                       {"seed", d.seed},
                       {"psi_only", d.psi_only},
                       {"metric_scale", d.metric_scale},
                       {"metric", poly_map_json(d.metric)},
                       {"f", poly_json(d.f)},
                       {"beta", form_json(d.beta)},
                       {"psi", form_json(d.psi)},
                       {"F", form_json(d.F)},
                       {"F_degree", d.F_degree}};
  const FlowConfig& f = c.flow;
  j["flow"] = ojson{{"scheme", to_string(f.scheme)},
                    {"dt", f.dt},
                    {"c_cfl", f.c_cfl},
                    {"t_end", f.t_end},
                    {"gauge", to_string(f.gauge)},
                    {"reference", f.reference == ReferenceMetric::flat ? "flat" : "initial"},
                    {"k_max", f.k_max},
                    {"cadence", f.cadence},
                    {"max_halvings", f.max_halvings},
                    {"force", f.force},
                    {"freeze_metric", f.freeze_metric},
                    {"curvature_every", f.curvature_every},
                    {"shi", ojson{{"A", f.shi.A}, {"A0", f.shi.A0}, {"A1", f.shi.A1}, {"A2", f.shi.A2},
                                  {"B", f.shi.B}, {"Bi", f.shi.Bi}, {"m", f.shi.m}}}};
  j["diagnostics"] = ojson{{"curvature", c.diagnostics.curvature}, {"field_equations", c.diagnostics.field_equations},
                           {"alpha", c.diagnostics.alpha},         {"shi", c.diagnostics.shi},
                           {"action", c.diagnostics.action}};
  j["ode"] = ojson{{"preset", to_string(c.ode.preset)},
                   {"s", c.ode.s},
                   {"f", c.ode.f},
                   {"b", c.ode.b},
                   {"c", c.ode.c},
                   {"task", c.ode.task},
                   {"dt", c.ode.dt},
                   {"newton", ojson{{"free", c.ode.free}, {"tol", c.ode.tol}, {"max_iter", c.ode.max_iter}}}};
  j["verify"] = ojson{{"seed", c.verify.seed}, {"full", c.verify.full}};
  j["output"] = ojson{{"dir", c.output.dir}, {"timing", c.output.timing}, {"checkpoint_every", c.output.checkpoint_every}};
  return j;
}

void apply_refinement(RunConfig& c, int k) {
  if (k < 1) throw ConfigError("/refine", "must be >= 1");
  if (k == 1) return;
  if (c.grid) {
    for (int& s : c.grid->shape) {
      if (s > 1) s *= k;
    }
  }
  c.flow.dt /= static_cast<double>(k) * k;
  validate(c);
}

}  // namespace sgflow::app
