#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "sgflow/error.hpp"
#include "sgflow/io.hpp"
#include "test_util.hpp"

namespace sgflow {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("sgflow_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_bits(const GridData& a, const GridData& b) {
  return a.grid() == b.grid() && a.channels() == b.channels() && a.raw() == b.raw();
}

TEST(Container, FormRoundTripIsExact) {
  std::mt19937_64 rng(5);
  const GridSpec grid({6, 1, 8}, {1.0, 2.0, 0.5});
  const DifferentialForm a = fixtures::random_form(grid, 2, rng);
  std::stringstream ss;
  write_container(ss, a);
  const DifferentialForm b = read_form(ss);
  EXPECT_EQ(b.degree(), 2);
  EXPECT_TRUE(same_bits(a, b));
}

TEST(Container, KindAndMagicAreChecked) {
  const GridSpec grid = GridSpec::cube(2, 4);
  std::stringstream ss;
  write_container(ss, ScalarField(grid, 1.0));
  EXPECT_THROW(read_form(ss), IoError);
  std::stringstream bad("XXXX0000");
  EXPECT_THROW(read_scalar(bad), IoError);
  std::stringstream truncated(std::string("SGFC"));
  EXPECT_THROW(read_scalar(truncated), IoError);
}

TEST_F(TempDir, ReducedCheckpointRoundTrip) {
  const ReducedState s = fixtures::smooth_reduced(2, 2, 6, -1, 0.25, 9);
  write_checkpoint(path("r.sgck"), s);
  EXPECT_EQ(checkpoint_kind(path("r.sgck")), "reduced");
  const ReducedState r = read_reduced_checkpoint(path("r.sgck"));
  EXPECT_TRUE(same_bits(r.ghat.tensor(), s.ghat.tensor()));
  EXPECT_TRUE(same_bits(r.f, s.f));
  EXPECT_TRUE(same_bits(r.beta, s.beta));
  EXPECT_TRUE(same_bits(r.psi, s.psi));
  EXPECT_EQ(r.factor.p(), 2);
  EXPECT_EQ(r.sigma(), -1);
  EXPECT_EQ(r.factor.lambda, 0.25);
  EXPECT_EQ(r.t, s.t);
  EXPECT_THROW(read_euclidean_checkpoint(path("r.sgck")), IoError);
}

TEST_F(TempDir, EuclideanCheckpointRoundTrip) {
  const GridSpec grid = GridSpec::cube(3, 6);
  EuclideanState s{fixtures::smooth_metric(grid, 0.1, 3), fixtures::closed_form(grid, 2, 0.2, 4), 1, 0.125};
  write_checkpoint(path("e.sgck"), s);
  const EuclideanState r = read_euclidean_checkpoint(path("e.sgck"));
  EXPECT_EQ(checkpoint_kind(path("e.sgck")), "euclidean");
  EXPECT_TRUE(same_bits(r.g.tensor(), s.g.tensor()));
  EXPECT_TRUE(same_bits(r.F, s.F));
  EXPECT_EQ(r.t, 0.125);
}

TEST_F(TempDir, MissingPathsAreReported) {
  const std::string bad = path("no/such/dir/x.sgck");
  try {
    read_reduced_checkpoint(bad);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(e.path(), bad);
  }
  const GridSpec grid = GridSpec::cube(3, 4);
  EXPECT_THROW(write_checkpoint(bad, EuclideanState{MetricField::flat(grid), DifferentialForm(grid, 2), 1, 0.0}),
               IoError);
}

TEST(Json, RecordKeysAreStable) {
  DiagnosticsRecord a;
  a.step = 3;
  a.sup_f = 0.5;
  a.shi["G1"] = 2.0;
  DiagnosticsRecord b;
  b.r1 = 1e-3;
  const ojson ja = to_json(a), jb = to_json(b);
  std::vector<std::string> ka, kb;
  for (const auto& [k, v] : ja.items()) ka.push_back(k);
  for (const auto& [k, v] : jb.items()) kb.push_back(k);
  EXPECT_EQ(ka, kb);
  EXPECT_EQ(ka.front(), "step");
  EXPECT_TRUE(ja["r1"].is_null());
  EXPECT_EQ(ja["sup_f"].get<double>(), 0.5);
}

TEST(Json, RecordRoundTrip) {
  DiagnosticsRecord a;
  a.step = 7;
  a.t = 0.1;
  a.dt = 1.0 / 3.0;
  a.sup_rm = 1.25;
  a.closed_psi = 1e-17;
  a.shi = {{"G0", 1.0}, {"H", 2.0}};
  a.shi_m = 3;
  a.c0 = 0.75;
  const DiagnosticsRecord b = record_from_json(ojson::parse(to_json(a).dump()));
  EXPECT_EQ(b.step, 7);
  EXPECT_EQ(b.dt, a.dt);
  EXPECT_EQ(b.sup_rm, a.sup_rm);
  EXPECT_EQ(b.closed_psi, a.closed_psi);
  EXPECT_FALSE(b.r2.has_value());
  EXPECT_EQ(b.shi, a.shi);
  EXPECT_EQ(b.shi_m, 3);
  EXPECT_EQ(b.c0, 0.75);
}

TEST_F(TempDir, JsonlTimingIsIsolated) {
  DiagnosticsRecord r;
  r.sup_f = 1.0;
  {
    JsonlWriter with(path("a.jsonl"), true);
    JsonlWriter without(path("b.jsonl"), false);
    for (int i = 0; i < 3; ++i) {
      r.step = i;
      with.write(r);
      without.write(r);
    }
    EXPECT_EQ(with.lines(), 3);
  }
  std::ifstream a(path("a.jsonl")), b(path("b.jsonl"));
  std::string la, lb;
  int n = 0;
  while (std::getline(a, la) && std::getline(b, lb)) {
    ojson ja = ojson::parse(la);
    ASSERT_TRUE(ja.contains("timing"));
    ja.erase("timing");
    EXPECT_EQ(ja.dump(), lb);
    ++n;
  }
  EXPECT_EQ(n, 3);
}

TEST_F(TempDir, TrajectoryCsv) {
  OdeOptions opt;
  opt.dt = 0.01;
  opt.t_end = 0.1;
  const OdeTrajectory tr = integrate_ode(HomogeneousState::psi_preset(1.0, 0.2, -0.1), opt);
  write_trajectory_csv(path("t.csv"), tr);
  std::ifstream in(path("t.csv"));
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header, "t,s,f,b,c,ds,df,db,dc,rhs_norm");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 9);
    ++rows;
  }
  EXPECT_EQ(rows, tr.samples.size());
}

TEST_F(TempDir, OutputIsDeterministic) {
  const ReducedState s = fixtures::smooth_reduced(7, 3, 6, 1, 0.0, 2);
  write_checkpoint(path("a.sgck"), s);
  write_checkpoint(path("b.sgck"), s);
  EXPECT_EQ(slurp(path("a.sgck")), slurp(path("b.sgck")));
}

}  // namespace
}  // namespace sgflow
