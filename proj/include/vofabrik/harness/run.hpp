#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vofabrik/harness/scenario.hpp"
#include "vofabrik/harness/trajectory.hpp"
#include "vofabrik/harness/validate.hpp"
#include "vofabrik/planner.hpp"

namespace vofabrik::harness {

inline const char* to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::GoalReached: return "GoalReached";
    case PlanStatus::Stalled: return "Stalled";
    case PlanStatus::StepLimit: return "StepLimit";
    case PlanStatus::SafeSetEmpty: return "SafeSetEmpty";
    case PlanStatus::NoAdmissibleVelocity: return "NoAdmissibleVelocity";
  }
  return "Unknown";
}

inline const char* to_string(Solver s) { return s == Solver::VoFabrik ? "vofabrik" : "fabrik"; }

inline Solver solver_from_string(const std::string& name) {
  if (name == "vofabrik") return Solver::VoFabrik;
  if (name == "fabrik") return Solver::PlainFabrik;
  throw ValidationError("unknown solver '" + name + "' (expected vofabrik or fabrik)");
}

/// Parses and validates a scenario file, including collision freedom of the
/// initial pose.
inline Scenario load_scenario(const std::string& path,
                              const std::vector<std::pair<std::string, double>>& overrides = {}) {
  Scenario s = parse_scenario(read_text_file(path), overrides);
  const std::vector<ChainState> initial{s.initial_state()};
  for (const auto& v : validate_trajectory(s.chain, initial, s.obstacles))
    if (v.kind == ViolationKind::ObstacleClearance || v.kind == ViolationKind::SelfClearance)
      throw ValidationError("initial state in collision: " + v.describe());
  return s;
}

struct RunReport {
  std::string scenario;
  std::string solver;
  PlanStatus status = PlanStatus::StepLimit;
  double joint_disp_mean = 0.0;
  double joint_disp_std = 0.0;
  double time_per_step_mean = 0.0;
  double time_per_step_std = 0.0;
  double min_clearance = std::numeric_limits<double>::infinity();
  std::size_t step_count = 0;
  std::size_t violations = 0;
};

namespace detail {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

inline MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(var / static_cast<double>(xs.size()));
  return m;
}

}  // namespace detail

/// Statistics of a recorded run.
///
/// Joint displacement pools |delta angle| of every movable axis (an axis
/// whose limits are not collapsed to a point) over all joints and steps.
/// Time per step pools planner wall time over steps; row 0 is the initial
/// state and contributes neither.
inline RunReport compute_report(const ChainModel& model, const TrajectoryRecord& rec, PlanStatus status,
                                const std::string& solver) {
  RunReport r;
  r.scenario = rec.scenario;
  r.solver = solver;
  r.status = status;
  r.step_count = rec.rows.empty() ? 0 : rec.rows.size() - 1;
  std::vector<double> disp, times;
  for (std::size_t k = 1; k < rec.rows.size(); ++k) {
    for (std::size_t j = 0; j < model.link_count(); ++j) {
      const auto& lim = model.limits()[j];
      if (lim.pitch_max > lim.pitch_min)
        disp.push_back(std::abs(rec.rows[k].angles[j].pitch - rec.rows[k - 1].angles[j].pitch));
      if (lim.yaw_max > lim.yaw_min)
        disp.push_back(std::abs(rec.rows[k].angles[j].yaw - rec.rows[k - 1].angles[j].yaw));
    }
    times.push_back(rec.rows[k].wall_time);
  }
  const auto d = detail::mean_std(disp);
  const auto t = detail::mean_std(times);
  r.joint_disp_mean = d.mean;
  r.joint_disp_std = d.std;
  r.time_per_step_mean = t.mean;
  r.time_per_step_std = t.std;
  for (const auto& row : rec.rows) r.min_clearance = std::min(r.min_clearance, row.min_clearance);
  return r;
}

inline nlohmann::json to_json(const RunReport& r) {
  auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"scenario", r.scenario},
          {"solver", r.solver},
          {"status", to_string(r.status)},
          {"joint_disp_mean", r.joint_disp_mean},
          {"joint_disp_std", r.joint_disp_std},
          {"time_per_step_mean", r.time_per_step_mean},
          {"time_per_step_std", r.time_per_step_std},
          {"min_clearance", finite_or_null(r.min_clearance)},
          {"step_count", r.step_count},
          {"violations", r.violations}};
}

struct RunResult {
  PlanOutcome outcome;
  TrajectoryRecord record;
  RunReport report;
  std::vector<Violation> violations;

  bool passed() const { return report.status == PlanStatus::GoalReached && violations.empty(); }
};

/// Runs one solver on a scenario, validates the trajectory independently
/// and, when `out_dir` is given, writes `<name>.<solver>.csv` and
/// `<name>.<solver>.report.json` there.
inline RunResult run_and_report(const Scenario& s, Solver solver, const std::optional<std::string>& out_dir = {}) {
  RunResult res;
  res.outcome = plan(s.chain, s.initial_state(), s.goal, s.obstacles, s.planner, solver);
  res.record = make_record(s.name, res.outcome, s.planner.t_s);
  res.violations = validate_trajectory(s.chain, res.outcome.trajectory, s.obstacles, s.planner.t_s);
  res.report = compute_report(s.chain, res.record, res.outcome.status, to_string(solver));
  res.report.violations = res.violations.size();

  if (out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(*out_dir);
    const fs::path stem = fs::path(*out_dir) / (s.name + "." + to_string(solver));
    std::ofstream csv(stem.string() + ".csv", std::ios::binary);
    write_csv(csv, res.record);
    std::ofstream rep(stem.string() + ".report.json", std::ios::binary);
    rep << to_json(res.report).dump(2) << '\n';
    if (!csv || !rep) throw Error("failed writing results under '" + *out_dir + "'");
  }
  return res;
}

}  // namespace vofabrik::harness
