#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vofabrik/chain.hpp"
#include "vofabrik/errors.hpp"
#include "vofabrik/planner.hpp"
#include "vofabrik/velocity_obstacles.hpp"

namespace vofabrik::harness {

inline constexpr int kSchemaVersion = 1;

class ParseError : public Error {
public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

/// A declarative planning problem. Lengths in metres, angles in radians.
struct Scenario {
  std::string name;
  ChainModel chain;
  std::vector<JointAngles> initial_angles;
  Point3 goal;
  std::vector<SphereObstacle> obstacles;
  PlannerConfig planner;

  ChainState initial_state() const { return make_state(chain, initial_angles); }
};

/// Sets one PlannerConfig field by its dotted name, e.g. `ik.epsilon`.
/// Returns false for unknown keys.
inline bool apply_override(PlannerConfig& cfg, const std::string& key, double value) {
  auto as_int = [&] { return static_cast<int>(std::llround(value)); };
  if (key == "t_s") cfg.t_s = value;
  else if (key == "v_pref_speed") cfg.v_pref_speed = value;
  else if (key == "goal_tolerance") cfg.goal_tolerance = value;
  else if (key == "max_steps") cfg.max_steps = as_int();
  else if (key == "stall_window") cfg.stall_window = as_int();
  else if (key == "stall_displacement") cfg.stall_displacement = value;
  else if (key == "angular_resolution") cfg.angular_resolution = value;
  else if (key == "clearance_margin") cfg.clearance_margin = value;
  else if (key == "max_step_halvings") cfg.max_step_halvings = as_int();
  else if (key == "ik.epsilon") cfg.ik.epsilon = value;
  else if (key == "ik.max_iterations") cfg.ik.max_iterations = as_int();
  else if (key == "ik.limit_tolerance") cfg.ik.limit_tolerance = value;
  else if (key == "vo.time_horizon") cfg.vo.time_horizon = value;
  else if (key == "vo.boundary_epsilon") cfg.vo.boundary_epsilon = value;
  else if (key == "vo.direction_samples") cfg.vo.direction_samples = as_int();
  else return false;
  return true;
}

/// Applies `key=value` overrides; the VO horizon follows 3 * t_s unless it
/// is set explicitly.
inline void apply_overrides(PlannerConfig& cfg, const std::vector<std::pair<std::string, double>>& overrides) {
  bool horizon_set = false;
  for (const auto& [key, value] : overrides) {
    if (!apply_override(cfg, key, value)) throw ValidationError("unknown planner setting '" + key + "'");
    horizon_set = horizon_set || key == "vo.time_horizon";
  }
  if (!horizon_set) cfg.vo.time_horizon = 3.0 * cfg.t_s;
}

inline void check_planner_config(const PlannerConfig& c) {
  const bool positive = c.t_s > 0 && c.v_pref_speed > 0 && c.goal_tolerance > 0 && c.max_steps > 0 &&
                        c.stall_window >= 1 && c.stall_displacement > 0 && c.angular_resolution > 0 &&
                        c.clearance_margin >= 0 && c.max_step_halvings >= 0 && c.ik.epsilon > 0 &&
                        c.ik.max_iterations >= 1 && c.ik.limit_tolerance >= 0 && c.vo.time_horizon > 0 &&
                        c.vo.boundary_epsilon >= 0 && c.vo.direction_samples >= 64;
  if (!positive) throw ValidationError("planner settings out of range");
}

namespace detail {

class Reader {
public:
  const nlohmann::json& at(const nlohmann::json& obj, const std::string& key, const std::string& path) const {
    if (!obj.is_object() || !obj.contains(key)) throw ParseError("missing field '" + join(path, key) + "'");
    return obj.at(key);
  }

  double number(const nlohmann::json& v, const std::string& path) const {
    if (!v.is_number()) throw ParseError("field '" + path + "': expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError("field '" + path + "': not finite");
    return d;
  }

  double number(const nlohmann::json& obj, const std::string& key, const std::string& path) const {
    return number(at(obj, key, path), join(path, key));
  }

  Vec3 vec3(const nlohmann::json& v, const std::string& path) const {
    if (!v.is_array() || v.size() != 3) throw ParseError("field '" + path + "': expected [x, y, z]");
    return {number(v[0], path + "[0]"), number(v[1], path + "[1]"), number(v[2], path + "[2]")};
  }

  const nlohmann::json& array(const nlohmann::json& obj, const std::string& key, const std::string& path) const {
    const auto& v = at(obj, key, path);
    if (!v.is_array()) throw ParseError("field '" + join(path, key) + "': expected an array");
    return v;
  }

  std::pair<double, double> range(const nlohmann::json& v, const std::string& path) const {
    if (!v.is_array() || v.size() != 2) throw ParseError("field '" + path + "': expected [min, max]");
    return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

inline std::string line_diagnostic(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

/// Scenario from a JSON document; `overrides` are applied after the
/// document's own `planner` section.
inline Scenario parse_scenario(const std::string& text,
                               const std::vector<std::pair<std::string, double>>& overrides = {}) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("malformed JSON at " + detail::line_diagnostic(text, e.byte) + ": " + e.what());
  }
  const detail::Reader rd;
  if (!doc.is_object()) throw ParseError("top level must be an object");

  const auto& version = rd.at(doc, "schema_version", "");
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion)
    throw ParseError("field 'schema_version': expected " + std::to_string(kSchemaVersion));
  const auto& name = rd.at(doc, "name", "");
  if (!name.is_string()) throw ParseError("field 'name': expected a string");

  const auto& chain = rd.at(doc, "chain", "");
  const Point3 base = rd.vec3(rd.at(chain, "base", "chain"), "chain.base");
  const Vec3 base_direction = rd.vec3(rd.at(chain, "base_direction", "chain"), "chain.base_direction");
  Vec3 world_up = Vec3::UnitZ();
  if (chain.contains("world_up")) world_up = rd.vec3(chain.at("world_up"), "chain.world_up");

  std::vector<Link> links;
  const auto& jlinks = rd.array(chain, "links", "chain");
  for (std::size_t i = 0; i < jlinks.size(); ++i) {
    const std::string p = "chain.links[" + std::to_string(i) + "]";
    links.push_back({rd.number(jlinks[i], "length", p), rd.number(jlinks[i], "thickness", p)});
  }
  std::vector<JointLimits> limits;
  const auto& jlimits = rd.array(chain, "limits", "chain");
  for (std::size_t i = 0; i < jlimits.size(); ++i) {
    const std::string p = "chain.limits[" + std::to_string(i) + "]";
    const auto [pmin, pmax] = rd.range(rd.at(jlimits[i], "pitch", p), p + ".pitch");
    const auto [ymin, ymax] = rd.range(rd.at(jlimits[i], "yaw", p), p + ".yaw");
    limits.push_back({pmin, pmax, ymin, ymax});
  }

  std::vector<JointAngles> initial;
  const auto& jangles = rd.array(doc, "initial_angles", "");
  for (std::size_t i = 0; i < jangles.size(); ++i) {
    const auto [pitch, yaw] = rd.range(jangles[i], "initial_angles[" + std::to_string(i) + "]");
    initial.push_back({pitch, yaw});
  }
  const Point3 goal = rd.vec3(rd.at(doc, "goal", ""), "goal");

  std::vector<SphereObstacle> obstacles;
  if (doc.contains("obstacles")) {
    const auto& jobs = rd.array(doc, "obstacles", "");
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const std::string p = "obstacles[" + std::to_string(i) + "]";
      SphereObstacle o;
      o.center = rd.vec3(rd.at(jobs[i], "center", p), p + ".center");
      o.radius = rd.number(jobs[i], "radius", p);
      if (jobs[i].contains("velocity")) o.velocity = rd.vec3(jobs[i].at("velocity"), p + ".velocity");
      if (!(o.radius > 0)) throw ValidationError(p + ": obstacle radius must be positive");
      obstacles.push_back(o);
    }
  }

  std::vector<std::pair<std::string, double>> settings;
  if (doc.contains("planner")) {
    const auto& jp = doc.at("planner");
    if (!jp.is_object()) throw ParseError("field 'planner': expected an object");
    for (const auto& [key, value] : jp.items()) settings.emplace_back(key, rd.number(value, "planner." + key));
  }
  settings.insert(settings.end(), overrides.begin(), overrides.end());
  PlannerConfig cfg;
  apply_overrides(cfg, settings);
  check_planner_config(cfg);

  if (limits.size() != links.size()) throw ValidationError("limits count (" + std::to_string(limits.size()) +
                                                           ") differs from link count (" +
                                                           std::to_string(links.size()) + ")");
  if (initial.size() != links.size()) throw ValidationError("initial_angles count differs from link count");

  std::optional<ChainModel> model;
  try {
    model.emplace(base, base_direction, std::move(links), std::move(limits), world_up);
  } catch (const InvalidModel& e) {
    throw ValidationError(std::string("chain: ") + e.what());
  }
  for (std::size_t i = 0; i < initial.size(); ++i)
    if (!model->limits()[i].contains(initial[i], cfg.ik.limit_tolerance))
      throw ValidationError("initial_angles[" + std::to_string(i) + "] outside joint limits");

  Scenario s{name.get<std::string>(), *model, std::move(initial), goal, std::move(obstacles), cfg};
  return s;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace vofabrik::harness
