#pragma once

// Brute-force reference computations. None of these call into the library
// beyond its plain data types, so they can be used to check it.

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "vofabrik/chain.hpp"
#include "vofabrik/geometry.hpp"

namespace oracle {

using vofabrik::JointAngles;
using vofabrik::Point3;
using vofabrik::Vec3;

inline constexpr double kPi = std::numbers::pi;

/// Dense sampling of t in [0, 1].
inline Point3 closest_on_segment(const Point3& p, const Point3& a, const Point3& b, int samples = 2'000'000) {
  double best = std::numeric_limits<double>::infinity();
  Point3 arg = a;
  for (int i = 0; i <= samples; ++i) {
    const Point3 q = a + (static_cast<double>(i) / samples) * (b - a);
    const double d = (q - p).squaredNorm();
    if (d < best) best = d, arg = q;
  }
  return arg;
}

/// Grid over both segment parameters.
inline double segment_distance(const Point3& a1, const Point3& b1, const Point3& a2, const Point3& b2,
                               int samples = 1000) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= samples; ++i) {
    const Point3 p = a1 + (static_cast<double>(i) / samples) * (b1 - a1);
    for (int j = 0; j <= samples; ++j) {
      const Point3 q = a2 + (static_cast<double>(j) / samples) * (b2 - a2);
      best = std::min(best, (p - q).squaredNorm());
    }
  }
  return std::sqrt(best);
}

/// Link frames as rotation matrices with columns (forward, lateral, up).
/// A joint applies yaw about the local z axis, then pitch about the new
/// local y axis, tilting forward towards up.
inline Eigen::Matrix3d base_rotation(const Vec3& base_direction, const Vec3& world_up) {
  const Vec3 f = base_direction.normalized();
  const Vec3 u = (world_up - world_up.dot(f) * f).normalized();
  Eigen::Matrix3d r;
  r.col(0) = f;
  r.col(1) = u.cross(f);
  r.col(2) = u;
  return r;
}

inline Eigen::Matrix3d joint_rotation(const JointAngles& a) {
  return (Eigen::AngleAxisd(a.yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(-a.pitch, Vec3::UnitY())).toRotationMatrix();
}

inline std::vector<Point3> fk(const Point3& base, const Vec3& base_direction, const Vec3& world_up,
                              const std::vector<double>& lengths, const std::vector<JointAngles>& angles) {
  std::vector<Point3> p{base};
  Eigen::Matrix3d r = base_rotation(base_direction, world_up);
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    r = r * joint_rotation(angles[i]);
    p.push_back(p.back() + lengths[i] * r.col(0));
  }
  return p;
}

/// Time-stepped sphere-sphere overlap test over [0, horizon].
inline bool simulated_collision(const Point3& agent, double agent_radius, const Vec3& v, const Point3& obstacle,
                                double obstacle_radius, const Vec3& obstacle_velocity, double horizon,
                                int steps = 10'000) {
  const double r = agent_radius + obstacle_radius;
  for (int k = 0; k <= steps; ++k) {
    const double t = horizon * k / steps;
    if (((agent + t * v) - (obstacle + t * obstacle_velocity)).norm() < r) return true;
  }
  return false;
}

/// Elbow positions of a two-link chain (base at origin) reaching `target`
/// in the plane spanned by the x axis and `target`.
inline std::vector<Point3> elbow_solutions(double l1, double l2, const Point3& target) {
  const double d = target.norm();
  const double a = (l1 * l1 - l2 * l2 + d * d) / (2.0 * d);
  const double h = std::sqrt(std::max(0.0, l1 * l1 - a * a));
  const Vec3 e1 = target / d;
  Vec3 e2 = Vec3::UnitX() - Vec3::UnitX().dot(e1) * e1;
  if (e2.norm() < 1e-9) e2 = Vec3::UnitY() - Vec3::UnitY().dot(e1) * e1;
  e2.normalize();
  return {a * e1 + h * e2, a * e1 - h * e2};
}

/// True when a link of `length` leaving `pivot` along `dir` passes within
/// `radius` of `center`, by sampling along the link.
inline bool link_hits_sphere(const Point3& pivot, const Vec3& dir, double length, const Point3& center, double radius,
                             int samples = 4000) {
  for (int i = 0; i <= samples; ++i)
    if ((pivot + (length * i / samples) * dir - center).norm() < radius) return true;
  return false;
}

/// Nearest point of a set given by a membership predicate, by grid search
/// over [p_lo, p_hi] x [y_lo, y_hi].
template <class Inside>
std::optional<JointAngles> nearest_by_grid(Inside inside, const JointAngles& desired, double p_lo, double p_hi,
                                           double y_lo, double y_hi, double step) {
  std::optional<JointAngles> best;
  double best_d = std::numeric_limits<double>::infinity();
  const int np = static_cast<int>(std::round((p_hi - p_lo) / step));
  const int ny = static_cast<int>(std::round((y_hi - y_lo) / step));
  for (int i = 0; i <= np; ++i) {
    for (int j = 0; j <= ny; ++j) {
      const JointAngles a{np ? p_lo + (p_hi - p_lo) * i / np : p_lo, ny ? y_lo + (y_hi - y_lo) * j / ny : y_lo};
      if (!inside(a)) continue;
      const double d = std::hypot(a.pitch - desired.pitch, a.yaw - desired.yaw);
      if (d < best_d) best_d = d, best = a;
    }
  }
  return best;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec3 v;
  do v = Vec3(n(rng), n(rng), n(rng));
  while (v.norm() < 1e-6);
  return v.normalized();
}

}  // namespace oracle
