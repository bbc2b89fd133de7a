#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sgflow/error.hpp"
#include "sgflow_app/config.hpp"
#include "sgflow_app/run.hpp"

int main(int argc, char** argv) {
  using namespace sgflow;
  using namespace sgflow::app;

  CLI::App cli{"Structured-grid geometric flows for warped supergravity backgrounds"};
  std::string config_path, mode, out_dir;
  std::uint64_t seed = 0;
  int refine = 1;
  cli.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  cli.add_option("--mode", mode, "override mode: euclidean, reduced, ode, verify");
  cli.add_option("--out", out_dir, "output directory");
  auto* seed_opt = cli.add_option("--seed", seed, "seed for randomized initial data and property suites");
  cli.add_option("--refine", refine, "multiply resolved grid axes by k and divide a fixed dt by k^2")
      ->check(CLI::PositiveNumber);
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    ojson doc = ojson::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw IoError(config_path, "cannot open");
      std::stringstream ss;
      ss << in.rdbuf();
      try {
        doc = ojson::parse(ss.str());
      } catch (const ojson::parse_error& e) {
        throw ConfigError("", config_path + ": " + e.what());
      }
    } else if (mode.empty()) {
      throw ConfigError("", "either --config or --mode is required");
    }
    if (!mode.empty()) doc["mode"] = mode;
    RunConfig cfg = config_from_json(doc);
    if (!out_dir.empty()) cfg.output.dir = out_dir;
    if (*seed_opt) {
      cfg.initial.seed = seed;
      cfg.verify.seed = seed;
    }
    if (refine > 1) apply_refinement(cfg, refine);
    return run_command(cfg, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
