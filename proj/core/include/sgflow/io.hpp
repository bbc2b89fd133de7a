#pragma once

#include <chrono>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "sgflow/diagnostics.hpp"
#include "sgflow/flow.hpp"
#include "sgflow/ode.hpp"
#include "sgflow/reductions.hpp"

namespace sgflow {

/// Self-describing binary container, little-endian throughout:
///   "SGFC" u32 version u32 kind i32 n i32 degree i32 shape[n] f64 lengths[n]
///   u64 channels u64 points f64 data[channels][points]
/// kind: 0 scalar, 1 form, 2 symmetric tensor (channels in upper row order).
enum class ContainerKind : std::uint32_t { scalar = 0, form = 1, sym_tensor = 2 };

void write_container(std::ostream& os, const ScalarField& f);
void write_container(std::ostream& os, const DifferentialForm& f);
void write_container(std::ostream& os, const SymTensorField& t);
ScalarField read_scalar(std::istream& is);
DifferentialForm read_form(std::istream& is);
SymTensorField read_sym_tensor(std::istream& is);

/// Checkpoint: "SGCK" u32 version u32 kind (0 reduced, 1 euclidean)
/// f64 t i32 p i32 sigma f64 lambda, followed by the field containers
/// (reduced: ĝ, f, β, Ψ; euclidean: g, F). Euclidean checkpoints store p = -1.
void write_checkpoint(const std::string& path, const ReducedState& s);
void write_checkpoint(const std::string& path, const EuclideanState& s);
ReducedState read_reduced_checkpoint(const std::string& path);
EuclideanState read_euclidean_checkpoint(const std::string& path);
/// "reduced" or "euclidean".
std::string checkpoint_kind(const std::string& path);

using ojson = nlohmann::ordered_json;

/// Every key is always present (null when not computed) so that lines of a
/// stream share one schema.
ojson to_json(const DiagnosticsRecord& r);
DiagnosticsRecord record_from_json(const ojson& j);
ojson to_json(const LiftReport& r);
ojson to_json(const SpecializationReport& r);
ojson to_json(const HomogeneousState& h);
ojson to_json(const NewtonResult& r);

/// One JSON object per line. Wall-clock timing, when enabled, is written in
/// a trailing "timing" member and is the only nondeterministic content.
class JsonlWriter {
 public:
  JsonlWriter(const std::string& path, bool timing);
  void write(const DiagnosticsRecord& r);
  void write(const ojson& j);
  long lines() const noexcept { return lines_; }

 private:
  std::string path_;
  std::ofstream os_;
  bool timing_;
  long lines_ = 0;
  std::chrono::steady_clock::time_point start_;
};

/// t,s,f,b,c,ds,df,db,dc,rhs_norm
void write_trajectory_csv(const std::string& path, const OdeTrajectory& tr);

/// Writes a JSON document (pretty-printed, trailing newline).
void write_json(const std::string& path, const ojson& j);

}  // namespace sgflow
