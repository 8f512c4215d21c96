#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <algorithm>
#include <array>
#include <cmath>

#include "vofabrik/errors.hpp"

namespace vofabrik {

using Vec3 = Eigen::Vector3d;
using Point3 = Eigen::Vector3d;

/// Segments shorter than this are rejected by every distance query.
inline constexpr double kDegenerateLength = 1e-12;

struct Segment3 {
  Point3 a;
  Point3 b;

  double length() const { return (b - a).norm(); }
};

/// A segment swept by a sphere: the volumetric model of one link.
struct Capsule3 {
  Segment3 axis;
  double radius = 0.0;
};

struct SegmentDistance {
  double distance = 0.0;
  Point3 on_first = Point3::Zero();
  Point3 on_second = Point3::Zero();
};

inline bool all_finite(const Vec3& v) { return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z()); }

namespace detail {

inline void require_segment(const Segment3& s) {
  if ((s.b - s.a).norm() < kDegenerateLength) throw DegenerateSegment();
}

inline double clamp01(double t) { return std::clamp(t, 0.0, 1.0); }

// Closest points between two non-degenerate segments (one-sided evaluation).
inline SegmentDistance segment_segment_raw(const Segment3& s1, const Segment3& s2) {
  const Vec3 d1 = s1.b - s1.a;
  const Vec3 d2 = s2.b - s2.a;
  const Vec3 r = s1.a - s2.a;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  const double c = d1.dot(r);
  const double b = d1.dot(d2);
  const double denom = a * e - b * b;

  double s = 0.0;
  if (denom > 1e-14 * a * e) s = clamp01((b * f - c * e) / denom);
  double t = (b * s + f) / e;
  if (t < 0.0) {
    t = 0.0;
    s = clamp01(-c / a);
  } else if (t > 1.0) {
    t = 1.0;
    s = clamp01((b - c) / a);
  }
  SegmentDistance out;
  out.on_first = s1.a + s * d1;
  out.on_second = s2.a + t * d2;
  out.distance = (out.on_first - out.on_second).norm();
  return out;
}

inline bool lexicographically_less(const Segment3& x, const Segment3& y) {
  const std::array<double, 6> kx{x.a.x(), x.a.y(), x.a.z(), x.b.x(), x.b.y(), x.b.z()};
  const std::array<double, 6> ky{y.a.x(), y.a.y(), y.a.z(), y.b.x(), y.b.y(), y.b.z()};
  return kx < ky;
}

}  // namespace detail

/// Clamped parametric projection of `p` onto `s`.
inline Point3 closest_point_on_segment(const Point3& p, const Segment3& s) {
  detail::require_segment(s);
  const Vec3 d = s.b - s.a;
  const double t = detail::clamp01((p - s.a).dot(d) / d.squaredNorm());
  return s.a + t * d;
}

inline double point_segment_distance(const Point3& p, const Segment3& s) {
  return (p - closest_point_on_segment(p, s)).norm();
}

/// Minimal distance between two segments together with a witness pair.
///
/// Both argument orders are evaluated and the smaller result kept, so the
/// returned distance is exactly symmetric and the witness pair swaps with the
/// arguments.
inline SegmentDistance segment_segment_distance(const Segment3& s1, const Segment3& s2) {
  detail::require_segment(s1);
  detail::require_segment(s2);
  const SegmentDistance forward = detail::segment_segment_raw(s1, s2);
  SegmentDistance reverse = detail::segment_segment_raw(s2, s1);
  std::swap(reverse.on_first, reverse.on_second);
  if (forward.distance < reverse.distance) return forward;
  if (reverse.distance < forward.distance) return reverse;
  return detail::lexicographically_less(s2, s1) ? reverse : forward;
}

/// Signed clearance between a capsule and a sphere; negative on overlap.
inline double capsule_sphere_distance(const Capsule3& c, const Point3& center, double radius) {
  return point_segment_distance(center, c.axis) - c.radius - radius;
}

/// Signed clearance between two capsules; negative on overlap.
inline double capsule_capsule_distance(const Capsule3& c1, const Capsule3& c2) {
  return segment_segment_distance(c1.axis, c2.axis).distance - c1.radius - c2.radius;
}

}  // namespace vofabrik
