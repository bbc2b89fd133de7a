#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sgflow_app/verify.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"Acceptance criteria"};
  int only = 0;
  std::uint64_t seed = 1;
  bool quick = false;
  cli.add_option("--criterion", only, "run a single criterion")->check(CLI::Range(1, sgflow::app::kCriteria));
  cli.add_option("--seed", seed, "random seed");
  cli.add_flag("--quick", quick, "shortened closedness and Shi runs");
  CLI11_PARSE(cli, argc, argv);

  bool ok = true;
  for (int id = 1; id <= sgflow::app::kCriteria; ++id) {
    if (only != 0 && id != only) continue;
    const sgflow::app::CriterionResult r = sgflow::app::run_criterion(id, {seed, !quick});
    std::cout << sgflow::app::format_line(r) << std::endl;
    ok = ok && r.as_expected();
  }
  return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
