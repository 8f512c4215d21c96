// Command-line front end: run a scenario, validate a stored trajectory, or
// compare VO-FABRIK against plain FABRIK.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vofabrik/harness/run.hpp"

namespace {

using namespace vofabrik;
using namespace vofabrik::harness;

std::vector<std::pair<std::string, double>> parse_sets(const std::vector<std::string>& sets) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--set expects key=value, got '" + s + "'");
    const std::string value = s.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) throw ValidationError("--set " + s + ": value is not a number");
    out.emplace_back(s.substr(0, eq), v);
  }
  return out;
}

void print_report(const RunResult& r) {
  std::printf("%-10s status=%s steps=%zu joint_disp=%.4g+-%.4g rad time_per_step=%.4g+-%.4g s "
              "min_clearance=%.4g m violations=%zu\n",
              r.report.solver.c_str(), to_string(r.report.status), r.report.step_count, r.report.joint_disp_mean,
              r.report.joint_disp_std, r.report.time_per_step_mean, r.report.time_per_step_std,
              r.report.min_clearance, r.violations.size());
  for (std::size_t i = 0; i < r.violations.size() && i < 10; ++i)
    std::printf("  violation: %s\n", r.violations[i].describe().c_str());
  if (r.violations.size() > 10) std::printf("  ... %zu more\n", r.violations.size() - 10);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VO-FABRIK planner for hyper-redundant serial chains"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, solver_name = "vofabrik", trajectory_path;
  std::vector<std::string> sets;

  auto* run = app.add_subcommand("run", "plan a scenario and write its trajectory and report");
  run->add_option("--scenario", scenario_path, "scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--solver", solver_name, "vofabrik or fabrik")->check(CLI::IsMember({"vofabrik", "fabrik"}));
  run->add_option("--out-dir", out_dir, "output directory")->required();
  run->add_option("--set", sets, "override a planner setting, key=value");

  auto* validate = app.add_subcommand("validate", "check a trajectory CSV against a scenario");
  validate->add_option("--scenario", scenario_path, "scenario JSON file")->required()->check(CLI::ExistingFile);
  validate->add_option("--trajectory", trajectory_path, "trajectory CSV")->required()->check(CLI::ExistingFile);
  validate->add_option("--set", sets, "override a planner setting, key=value");

  auto* compare = app.add_subcommand("compare", "run both solvers and write a side-by-side report");
  compare->add_option("--scenario", scenario_path, "scenario JSON file")->required()->check(CLI::ExistingFile);
  compare->add_option("--out-dir", out_dir, "output directory")->required();
  compare->add_option("--set", sets, "override a planner setting, key=value");

  CLI11_PARSE(app, argc, argv);

  try {
    const Scenario scenario = load_scenario(scenario_path, parse_sets(sets));

    if (*run) {
      const RunResult r = run_and_report(scenario, solver_from_string(solver_name), out_dir);
      print_report(r);
      return r.passed() ? 0 : 1;
    }

    if (*validate) {
      std::ifstream in(trajectory_path, std::ios::binary);
      const auto rec = read_csv(in, scenario.chain.link_count(), scenario.name);
      const auto states = states_from_record(scenario.chain, rec);
      const auto violations = validate_trajectory(scenario.chain, states, scenario.obstacles, scenario.planner.t_s);
      for (const auto& v : violations) std::printf("violation: %s\n", v.describe().c_str());
      std::printf("%zu steps checked, %zu violations\n", states.size(), violations.size());
      return violations.empty() ? 0 : 1;
    }

    if (*compare) {
      const RunResult vo = run_and_report(scenario, Solver::VoFabrik, out_dir);
      const RunResult plain = run_and_report(scenario, Solver::PlainFabrik, out_dir);
      print_report(vo);
      print_report(plain);
      const nlohmann::json side_by_side{{"scenario", scenario.name},
                                        {"vofabrik", to_json(vo.report)},
                                        {"fabrik", to_json(plain.report)}};
      std::ofstream(out_dir + "/" + scenario.name + ".compare.json") << side_by_side.dump(2) << '\n';
      return vo.passed() ? 0 : 1;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
