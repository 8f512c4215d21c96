#pragma once

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "vofabrik/chain.hpp"
#include "vofabrik/harness/scenario.hpp"
#include "vofabrik/planner.hpp"

namespace vofabrik::harness {

struct TrajectoryRow {
  std::size_t step = 0;
  double t = 0.0;
  std::vector<JointAngles> angles;
  Point3 end_effector = Point3::Zero();
  double min_clearance = 0.0;
  double wall_time = 0.0;
};

struct TrajectoryRecord {
  std::string scenario;
  std::vector<TrajectoryRow> rows;
};

/// Row k is stamped t = k * t_s; row 0 is the initial state.
inline TrajectoryRecord make_record(const std::string& scenario, const PlanOutcome& outcome, double t_s) {
  TrajectoryRecord rec;
  rec.scenario = scenario;
  for (std::size_t k = 0; k < outcome.trajectory.size(); ++k) {
    TrajectoryRow row;
    row.step = k;
    row.t = static_cast<double>(k) * t_s;
    row.angles = outcome.trajectory[k].angles;
    row.end_effector = outcome.trajectory[k].end_effector();
    row.min_clearance = outcome.per_step_metrics[k].min_clearance;
    row.wall_time = outcome.per_step_metrics[k].wall_time;
    rec.rows.push_back(std::move(row));
  }
  return rec;
}

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

inline std::string csv_header(std::size_t joints) {
  std::string h = "step,t";
  for (std::size_t i = 0; i < joints; ++i)
    h += ",alpha_" + std::to_string(i) + "_pitch,alpha_" + std::to_string(i) + "_yaw";
  return h + ",ee_x,ee_y,ee_z,min_clearance,wall_time";
}

inline void write_csv(std::ostream& os, const TrajectoryRecord& rec) {
  const std::size_t joints = rec.rows.empty() ? 0 : rec.rows.front().angles.size();
  os << csv_header(joints) << '\n';
  using detail::fmt17;
  for (const auto& r : rec.rows) {
    os << r.step << ',' << fmt17(r.t);
    for (const auto& a : r.angles) os << ',' << fmt17(a.pitch) << ',' << fmt17(a.yaw);
    os << ',' << fmt17(r.end_effector.x()) << ',' << fmt17(r.end_effector.y()) << ',' << fmt17(r.end_effector.z())
       << ',' << fmt17(r.min_clearance) << ',' << fmt17(r.wall_time) << '\n';
  }
}

inline TrajectoryRecord read_csv(std::istream& is, std::size_t joints, const std::string& scenario = {}) {
  TrajectoryRecord rec;
  rec.scenario = scenario;
  std::string line;
  if (!std::getline(is, line)) throw ParseError("trajectory: missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != csv_header(joints)) throw ParseError("trajectory: header does not match a " + std::to_string(joints) +
                                                   "-joint chain");
  const std::size_t columns = 2 + 2 * joints + 5;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != columns)
      throw ParseError("trajectory line " + std::to_string(lineno) + ": expected " + std::to_string(columns) +
                       " columns, got " + std::to_string(cells.size()));
    std::vector<double> v(columns);
    for (std::size_t c = 0; c < columns; ++c) {
      char* end = nullptr;
      v[c] = std::strtod(cells[c].c_str(), &end);
      if (end == cells[c].c_str() || *end != '\0')
        throw ParseError("trajectory line " + std::to_string(lineno) + ", column " + std::to_string(c + 1) +
                         ": not a number");
    }
    TrajectoryRow row;
    row.step = static_cast<std::size_t>(v[0]);
    if (static_cast<double>(row.step) != v[0] || (!rec.rows.empty() && row.step <= rec.rows.back().step))
      throw ParseError("trajectory line " + std::to_string(lineno) + ": step index not increasing");
    row.t = v[1];
    for (std::size_t j = 0; j < joints; ++j) row.angles.push_back({v[2 + 2 * j], v[3 + 2 * j]});
    const std::size_t e = 2 + 2 * joints;
    row.end_effector = {v[e], v[e + 1], v[e + 2]};
    row.min_clearance = v[e + 3];
    row.wall_time = v[e + 4];
    rec.rows.push_back(std::move(row));
  }
  if (rec.rows.empty()) throw ParseError("trajectory: no rows");
  return rec;
}

/// Chain states rebuilt from the recorded angles (limits are not enforced
/// here so that the validator can report them).
inline std::vector<ChainState> states_from_record(const ChainModel& model, const TrajectoryRecord& rec) {
  std::vector<ChainState> out;
  out.reserve(rec.rows.size());
  for (const auto& r : rec.rows) out.push_back({fk(model, r.angles, LimitCheck::None), r.angles});
  return out;
}

/// CSV text with the trailing wall_time column removed from every line.
inline std::string strip_wall_time(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    const auto comma = line.rfind(',');
    out += (comma == std::string::npos ? line : line.substr(0, comma));
    out += '\n';
  }
  return out;
}

}  // namespace vofabrik::harness
