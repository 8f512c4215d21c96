#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "vofabrik/errors.hpp"
#include "vofabrik/geometry.hpp"

namespace vofabrik {

struct SphereObstacle {
  Point3 center = Point3::Zero();
  double radius = 0.1;
  Vec3 velocity = Vec3::Zero();
};

/// Truncated collision cone of one obstacle, in velocity space.
struct CollisionCone {
  Vec3 apex_velocity_offset = Vec3::Zero();
  Vec3 axis = Vec3::UnitX();
  double half_angle = 0.0;
  double truncation_distance = 0.0;
  double combined_radius = 0.0;
};

struct VOConfig {
  double time_horizon = 0.6;
  double boundary_epsilon = 1e-3;
  int direction_samples = 2048;
};

inline CollisionCone collision_cone(const Point3& agent_center, double agent_radius, const SphereObstacle& obstacle) {
  const Vec3 offset = obstacle.center - agent_center;
  const double distance = offset.norm();
  const double combined = agent_radius + obstacle.radius;
  if (!(distance > combined)) throw AlreadyInCollision();
  CollisionCone cone;
  cone.apex_velocity_offset = obstacle.velocity;
  cone.axis = offset / distance;
  cone.half_angle = std::asin(std::min(1.0, combined / distance));
  cone.truncation_distance = distance;
  cone.combined_radius = combined;
  return cone;
}

namespace detail {

inline double angle_between(const Vec3& unit_axis, const Vec3& w, double w_norm) {
  return std::acos(std::clamp(unit_axis.dot(w) / w_norm, -1.0, 1.0));
}

// Distance travelled along a ray at `angle` from the axis before touching a
// sphere of `radius` centred `distance` ahead. Requires the ray to hit it.
inline double first_contact_distance(double distance, double radius, double angle) {
  const double along = distance * std::cos(angle);
  const double perp = distance * std::sin(angle);
  return along - std::sqrt(std::max(0.0, radius * radius - perp * perp));
}

// Membership with the cone widened by `margin` radians; the truncation cap
// is evaluated on the correspondingly widened sphere.
inline bool inside_widened(const Vec3& v, const CollisionCone& cone, double time_horizon, double margin) {
  const Vec3 w = v - cone.apex_velocity_offset;
  const double speed = w.norm();
  if (speed == 0.0) return false;
  const double angle = angle_between(cone.axis, w, speed);
  const double half = cone.half_angle + margin;
  if (!(angle < half)) return false;
  if (half >= std::numbers::pi / 2) return true;
  const double radius = cone.truncation_distance * std::sin(half);
  return first_contact_distance(cone.truncation_distance, radius, angle) <= speed * time_horizon;
}

}  // namespace detail

/// True when velocity `v` reaches the obstacle within the time horizon.
///
/// Directions within `boundary_epsilon` of the cone surface count as outside.
inline bool in_cone(const Vec3& v, const CollisionCone& cone, const VOConfig& cfg) {
  const Vec3 w = v - cone.apex_velocity_offset;
  const double speed = w.norm();
  if (speed == 0.0) return false;
  const double angle = detail::angle_between(cone.axis, w, speed);
  if (!(angle < cone.half_angle - cfg.boundary_epsilon)) return false;
  const double reach =
      detail::first_contact_distance(cone.truncation_distance, cone.combined_radius, angle);
  return reach <= speed * cfg.time_horizon;
}

/// Deterministic quasi-uniform directions on the unit sphere.
inline std::vector<Vec3> fibonacci_directions(int count) {
  std::vector<Vec3> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    dirs.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return dirs;
}

/// Closest-in-direction velocity of the same speed that avoids every cone.
///
/// Returns `v_pref` untouched when it is already admissible. Otherwise the
/// best lattice direction is refined by bisection along the great circle
/// towards `v_pref`; the result keeps `boundary_epsilon` of angular margin.
inline Vec3 admissible_velocity(const Vec3& v_pref, std::span<const CollisionCone> cones, const VOConfig& cfg) {
  const double speed = v_pref.norm();
  if (!(speed > 0.0)) throw Error("admissible_velocity needs a non-zero preferred velocity");
  const auto blocked = [&](const Vec3& v) {
    return std::any_of(cones.begin(), cones.end(), [&](const CollisionCone& c) {
      return detail::inside_widened(v, c, cfg.time_horizon, cfg.boundary_epsilon);
    });
  };
  if (!blocked(v_pref)) return v_pref;

  const Vec3 preferred = v_pref / speed;
  const auto lattice = fibonacci_directions(cfg.direction_samples);
  int best = -1;
  double best_dot = -2.0;
  for (int i = 0; i < static_cast<int>(lattice.size()); ++i) {
    const double dot = lattice[i].dot(preferred);
    if (dot > best_dot && !blocked(speed * lattice[i])) {
      best = i;
      best_dot = dot;
    }
  }
  if (best < 0) throw NoAdmissibleVelocity();

  // Bisect on the arc from the admissible lattice point towards v_pref.
  const Vec3 start = lattice[best];
  const double omega = std::acos(std::clamp(best_dot, -1.0, 1.0));
  Vec3 chosen = start;
  if (omega > 1e-12 && omega < std::numbers::pi - 1e-9) {
    const double so = std::sin(omega);
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      const Vec3 dir =
          ((std::sin((1.0 - mid) * omega) / so) * start + (std::sin(mid * omega) / so) * preferred).normalized();
      if (blocked(speed * dir)) {
        hi = mid;
      } else {
        lo = mid;
        chosen = dir;
      }
    }
  }
  return speed * chosen;
}

}  // namespace vofabrik
