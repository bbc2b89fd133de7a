#include "sgflow/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "sgflow/error.hpp"

namespace sgflow {
namespace {

constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U u = std::bit_cast<U>(v);
  char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((u >> (8 * i)) & 0xff);
  os.write(bytes, sizeof(T));
}

template <class T>
T get(std::istream& is) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw IoError("<stream>", "truncated container");
  U u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(u);
}

void put_magic(std::ostream& os, const char* m) { os.write(m, 4); }

void expect_magic(std::istream& is, const char* m) {
  char buf[4];
  if (!is.read(buf, 4) || std::memcmp(buf, m, 4) != 0) {
    throw IoError("<stream>", std::string("bad magic, expected ") + std::string(m, 4));
  }
}

void write_data(std::ostream& os, ContainerKind kind, int degree, const GridData& d) {
  const GridSpec& g = d.grid();
  put_magic(os, "SGFC");
  put(os, kVersion);
  put(os, static_cast<std::uint32_t>(kind));
  put(os, static_cast<std::int32_t>(g.dim()));
  put(os, static_cast<std::int32_t>(degree));
  for (int a = 0; a < g.dim(); ++a) put(os, static_cast<std::int32_t>(g.shape(a)));
  for (int a = 0; a < g.dim(); ++a) put(os, g.length(a));
  put(os, static_cast<std::uint64_t>(d.channels()));
  put(os, static_cast<std::uint64_t>(d.points()));
  for (double v : d.raw()) put(os, v);
  if (!os) throw IoError("<stream>", "write failed");
}

struct Header {
  ContainerKind kind;
  int degree;
  GridSpec grid;
  std::uint64_t channels;
};

Header read_header(std::istream& is) {
  expect_magic(is, "SGFC");
  if (get<std::uint32_t>(is) != kVersion) throw IoError("<stream>", "unsupported container version");
  const auto kind = static_cast<ContainerKind>(get<std::uint32_t>(is));
  const int n = get<std::int32_t>(is);
  const int degree = get<std::int32_t>(is);
  if (n < 0 || n > kMaxDim) throw IoError("<stream>", "container dimension out of range");
  std::vector<int> shape(n);
  std::vector<double> len(n);
  for (int& s : shape) s = get<std::int32_t>(is);
  for (double& l : len) l = get<double>(is);
  const auto channels = get<std::uint64_t>(is);
  const auto points = get<std::uint64_t>(is);
  Header h{kind, degree, GridSpec(shape, len), channels};
  if (points != h.grid.size()) throw IoError("<stream>", "point count does not match shape");
  return h;
}

void read_data(std::istream& is, GridData& d, std::uint64_t channels) {
  if (static_cast<std::uint64_t>(d.channels()) != channels) throw IoError("<stream>", "channel count mismatch");
  for (double& v : d.raw()) v = get<double>(is);
}

Header read_kind(std::istream& is, ContainerKind want) {
  Header h = read_header(is);
  if (h.kind != want) throw IoError("<stream>", "unexpected container kind");
  return h;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(path, mode);
  if (!os) throw IoError(path, "cannot open for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError(path, "cannot open for reading");
  return is;
}

struct CheckpointHeader {
  std::uint32_t kind;
  double t;
  int p;
  int sigma;
  double lambda;
};

void write_checkpoint_header(std::ostream& os, const CheckpointHeader& h) {
  put_magic(os, "SGCK");
  put(os, kVersion);
  put(os, h.kind);
  put(os, h.t);
  put(os, static_cast<std::int32_t>(h.p));
  put(os, static_cast<std::int32_t>(h.sigma));
  put(os, h.lambda);
}

CheckpointHeader read_checkpoint_header(std::istream& is) {
  expect_magic(is, "SGCK");
  if (get<std::uint32_t>(is) != kVersion) throw IoError("<stream>", "unsupported checkpoint version");
  CheckpointHeader h;
  h.kind = get<std::uint32_t>(is);
  h.t = get<double>(is);
  h.p = get<std::int32_t>(is);
  h.sigma = get<std::int32_t>(is);
  h.lambda = get<double>(is);
  return h;
}

template <class Fn>
auto rethrow_with_path(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const IoError& e) {
    if (e.path() == "<stream>") {
      std::string msg = e.what();
      msg = msg.substr(msg.find(": ") + 2);
      throw IoError(path, msg);
    }
    throw;
  }
}

ojson opt(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

std::optional<double> opt_from(const ojson& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

void write_container(std::ostream& os, const ScalarField& f) { write_data(os, ContainerKind::scalar, 0, f); }
void write_container(std::ostream& os, const DifferentialForm& f) {
  write_data(os, ContainerKind::form, f.degree(), f);
}
void write_container(std::ostream& os, const SymTensorField& t) { write_data(os, ContainerKind::sym_tensor, 2, t); }

ScalarField read_scalar(std::istream& is) {
  const Header h = read_kind(is, ContainerKind::scalar);
  ScalarField f(h.grid);
  read_data(is, f, h.channels);
  return f;
}

DifferentialForm read_form(std::istream& is) {
  const Header h = read_kind(is, ContainerKind::form);
  DifferentialForm f(h.grid, h.degree);
  read_data(is, f, h.channels);
  return f;
}

SymTensorField read_sym_tensor(std::istream& is) {
  const Header h = read_kind(is, ContainerKind::sym_tensor);
  SymTensorField t(h.grid);
  read_data(is, t, h.channels);
  return t;
}

void write_checkpoint(const std::string& path, const ReducedState& s) {
  std::ofstream os = open_out(path, std::ios::out | std::ios::binary | std::ios::trunc);
  write_checkpoint_header(os, {0, s.t, s.p(), s.sigma(), s.factor.lambda});
  write_container(os, s.ghat.tensor());
  write_container(os, s.f);
  write_container(os, s.beta);
  write_container(os, s.psi);
  if (!os.flush()) throw IoError(path, "write failed");
}

void write_checkpoint(const std::string& path, const EuclideanState& s) {
  std::ofstream os = open_out(path, std::ios::out | std::ios::binary | std::ios::trunc);
  write_checkpoint_header(os, {1, s.t, -1, s.sigma, 0.0});
  write_container(os, s.g.tensor());
  write_container(os, s.F);
  if (!os.flush()) throw IoError(path, "write failed");
}

ReducedState read_reduced_checkpoint(const std::string& path) {
  std::ifstream is = open_in(path);
  return rethrow_with_path(path, [&] {
    const CheckpointHeader h = read_checkpoint_header(is);
    if (h.kind != 0) throw IoError("<stream>", "not a reduced-state checkpoint");
    MetricField g(read_sym_tensor(is));
    ScalarField f = read_scalar(is);
    DifferentialForm beta = read_form(is);
    DifferentialForm psi = read_form(is);
    ReducedState s{std::move(g), std::move(f), std::move(beta), std::move(psi),
                   EinsteinFactor{h.p + 1, h.sigma, h.lambda}, h.t};
    s.validate();
    return s;
  });
}

EuclideanState read_euclidean_checkpoint(const std::string& path) {
  std::ifstream is = open_in(path);
  return rethrow_with_path(path, [&] {
    const CheckpointHeader h = read_checkpoint_header(is);
    if (h.kind != 1) throw IoError("<stream>", "not a Euclidean-state checkpoint");
    MetricField g(read_sym_tensor(is));
    DifferentialForm F = read_form(is);
    return EuclideanState{std::move(g), std::move(F), h.sigma, h.t};
  });
}

std::string checkpoint_kind(const std::string& path) {
  std::ifstream is = open_in(path);
  return rethrow_with_path(path, [&] { return std::string(read_checkpoint_header(is).kind == 0 ? "reduced" : "euclidean"); });
}

ojson to_json(const DiagnosticsRecord& r) {
  ojson j;
  j["step"] = r.step;
  j["t"] = r.t;
  j["dt"] = r.dt;
  j["sup_rm"] = opt(r.sup_rm);
  j["sup_f"] = opt(r.sup_f);
  j["sup_beta"] = opt(r.sup_beta);
  j["sup_psi"] = opt(r.sup_psi);
  j["sup_F"] = opt(r.sup_F);
  j["sup_grad_F"] = opt(r.sup_grad_F);
  j["sup_grad_f"] = opt(r.sup_grad_f);
  j["closed_beta"] = opt(r.closed_beta);
  j["closed_psi"] = opt(r.closed_psi);
  j["closed_F"] = opt(r.closed_F);
  j["r1"] = opt(r.r1);
  j["r2"] = opt(r.r2);
  j["stationary"] = opt(r.stationary);
  ojson shi = ojson::object();
  for (const auto& [k, v] : r.shi) shi[k] = v;
  j["shi"] = shi;
  j["shi_m"] = r.shi_m ? ojson(*r.shi_m) : ojson(nullptr);
  j["action"] = opt(r.action);
  j["d_alpha"] = opt(r.d_alpha);
  j["codiff_alpha"] = opt(r.codiff_alpha);
  j["c0"] = opt(r.c0);
  return j;
}

DiagnosticsRecord record_from_json(const ojson& j) {
  DiagnosticsRecord r;
  r.step = j.at("step").get<long>();
  r.t = j.at("t").get<double>();
  r.dt = j.at("dt").get<double>();
  r.sup_rm = opt_from(j, "sup_rm");
  r.sup_f = opt_from(j, "sup_f");
  r.sup_beta = opt_from(j, "sup_beta");
  r.sup_psi = opt_from(j, "sup_psi");
  r.sup_F = opt_from(j, "sup_F");
  r.sup_grad_F = opt_from(j, "sup_grad_F");
  r.sup_grad_f = opt_from(j, "sup_grad_f");
  r.closed_beta = opt_from(j, "closed_beta");
  r.closed_psi = opt_from(j, "closed_psi");
  r.closed_F = opt_from(j, "closed_F");
  r.r1 = opt_from(j, "r1");
  r.r2 = opt_from(j, "r2");
  r.stationary = opt_from(j, "stationary");
  if (j.contains("shi")) {
    for (const auto& [k, v] : j.at("shi").items()) r.shi[k] = v.get<double>();
  }
  if (j.contains("shi_m") && !j.at("shi_m").is_null()) r.shi_m = j.at("shi_m").get<int>();
  r.action = opt_from(j, "action");
  r.d_alpha = opt_from(j, "d_alpha");
  r.codiff_alpha = opt_from(j, "codiff_alpha");
  r.c0 = opt_from(j, "c0");
  return r;
}

ojson to_json(const LiftReport& r) {
  return ojson{{"g_ab", r.g_ab}, {"g_ij", r.g_ij}, {"F_beta", r.F_beta}, {"F_psi", r.F_psi}, {"g_mixed", r.g_mixed}};
}

ojson to_json(const SpecializationReport& r) {
  return ojson{{"beta_path", opt(r.beta_path)}, {"psi_path", opt(r.psi_path)}};
}

ojson to_json(const HomogeneousState& h) {
  return ojson{{"preset", to_string(h.preset)}, {"p", h.p}, {"s", h.s}, {"f", h.f}, {"b", h.b}, {"c", h.c},
               {"kappa", h.kappa}, {"lambda", h.lambda}, {"sigma", h.sigma}, {"t", h.t}};
}

ojson to_json(const NewtonResult& r) {
  ojson spec = ojson::array();
  for (const auto& e : r.spectrum) spec.push_back(ojson{{"re", e.real()}, {"im", e.imag()}});
  return ojson{{"point", to_json(r.point)},   {"iterations", r.iterations},
               {"rhs_norm", r.rhs_norm},      {"residual_history", r.residual_history},
               {"spectrum", spec},            {"r1_sup", r.r1_sup},
               {"r2_sup", r.r2_sup},          {"certified", r.certified}};
}

JsonlWriter::JsonlWriter(const std::string& path, bool timing)
    : path_(path), os_(open_out(path, std::ios::out | std::ios::trunc)), timing_(timing),
      start_(std::chrono::steady_clock::now()) {}

void JsonlWriter::write(const DiagnosticsRecord& r) { write(to_json(r)); }

void JsonlWriter::write(const ojson& j) {
  if (timing_) {
    ojson line = j;
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    line["timing"] = ojson{{"wall_seconds", s}};
    os_ << line.dump() << '\n';
  } else {
    os_ << j.dump() << '\n';
  }
  if (!os_) throw IoError(path_, "write failed");
  ++lines_;
}

void write_trajectory_csv(const std::string& path, const OdeTrajectory& tr) {
  std::ofstream os = open_out(path);
  os << "t,s,f,b,c,ds,df,db,dc,rhs_norm\n";
  os.precision(17);
  for (const OdeSample& x : tr.samples) {
    os << x.t << ',' << x.state.s << ',' << x.state.f << ',' << x.state.b << ',' << x.state.c << ',' << x.rhs.ds << ','
       << x.rhs.df << ',' << x.rhs.db << ',' << x.rhs.dc << ',' << x.rhs.norm() << '\n';
  }
  if (!os) throw IoError(path, "write failed");
}

void write_json(const std::string& path, const ojson& j) {
  std::ofstream os = open_out(path);
  os << j.dump(2) << '\n';
  if (!os) throw IoError(path, "write failed");
}

}  // namespace sgflow
