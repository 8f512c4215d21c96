#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vofabrik/chain.hpp"
#include "vofabrik/geometry.hpp"
#include "vofabrik/velocity_obstacles.hpp"

namespace vofabrik::harness {

enum class ViolationKind { Shape, BaseAnchor, RigidLink, Kinematics, JointLimit, ObstacleClearance, SelfClearance };

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::Shape: return "shape";
    case ViolationKind::BaseAnchor: return "base_anchor";
    case ViolationKind::RigidLink: return "rigid_link";
    case ViolationKind::Kinematics: return "kinematics";
    case ViolationKind::JointLimit: return "joint_limit";
    case ViolationKind::ObstacleClearance: return "obstacle_clearance";
    case ViolationKind::SelfClearance: return "self_clearance";
  }
  return "unknown";
}

struct Violation {
  ViolationKind kind;
  std::size_t step = 0;
  std::size_t link = 0;
  std::size_t other = 0;  // obstacle index or second link, when relevant
  double value = 0.0;     // offending clearance, error or angle

  std::string describe() const {
    std::string s = std::string(to_string(kind)) + " at step " + std::to_string(step) + ", link " + std::to_string(link);
    if (kind == ViolationKind::ObstacleClearance) s += ", obstacle " + std::to_string(other);
    if (kind == ViolationKind::SelfClearance) s += ", link " + std::to_string(other);
    return s + " (" + std::to_string(value) + ")";
  }
};

struct ValidationTolerances {
  double length = 1e-9;
  double angle = 1e-9;
  double base = 1e-12;
};

/// Re-checks every state of a trajectory using only geometry primitives and
/// the chain description: rigid links, base anchoring, fk consistency, joint
/// limits, strictly positive clearance to every obstacle and between every
/// pair of links that do not share a joint. Obstacles move with their
/// velocity, state k being taken at time k * time_step.
inline std::vector<Violation> validate_trajectory(const ChainModel& model, std::span<const ChainState> trajectory,
                                                  std::span<const SphereObstacle> obstacles, double time_step = 0.0,
                                                  const ValidationTolerances& tol = {}) {
  std::vector<Violation> out;
  const std::size_t n = model.link_count();
  for (std::size_t s = 0; s < trajectory.size(); ++s) {
    const ChainState& st = trajectory[s];
    if (st.positions.size() != n + 1 || st.angles.size() != n) {
      out.push_back({ViolationKind::Shape, s, 0, 0, 0.0});
      continue;
    }
    if (const double e = (st.positions[0] - model.base()).norm(); e > tol.base)
      out.push_back({ViolationKind::BaseAnchor, s, 0, 0, e});

    std::vector<bool> usable(n, true);
    for (std::size_t i = 0; i < n; ++i) {
      const double len = (st.positions[i + 1] - st.positions[i]).norm();
      if (std::abs(len - model.links()[i].length) > tol.length)
        out.push_back({ViolationKind::RigidLink, s, i, 0, len - model.links()[i].length});
      usable[i] = len >= kDegenerateLength;
      if (!model.limits()[i].contains(st.angles[i], tol.angle))
        out.push_back({ViolationKind::JointLimit, s, i, 0, 0.0});
    }
    const auto expected = fk(model, st.angles, LimitCheck::None);
    for (std::size_t i = 0; i <= n; ++i) {
      if (const double e = (expected[i] - st.positions[i]).norm(); e > tol.length) {
        out.push_back({ViolationKind::Kinematics, s, i, 0, e});
        break;
      }
    }

    const double t = time_step * static_cast<double>(s);
    for (std::size_t i = 0; i < n; ++i) {
      if (!usable[i]) continue;
      const Capsule3 cap{{st.positions[i], st.positions[i + 1]}, model.links()[i].thickness};
      for (std::size_t k = 0; k < obstacles.size(); ++k) {
        const Point3 center = obstacles[k].center + t * obstacles[k].velocity;
        const double c = capsule_sphere_distance(cap, center, obstacles[k].radius);
        if (!(c > 0.0)) out.push_back({ViolationKind::ObstacleClearance, s, i, k, c});
      }
      for (std::size_t j = i + 2; j < n; ++j) {
        if (!usable[j]) continue;
        const double d = segment_segment_distance(cap.axis, {st.positions[j], st.positions[j + 1]}).distance;
        const double c = d - model.links()[i].thickness - model.links()[j].thickness;
        if (!(c > 0.0)) out.push_back({ViolationKind::SelfClearance, s, i, j, c});
      }
    }
  }
  return out;
}

}  // namespace vofabrik::harness
