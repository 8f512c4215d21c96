#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "vofabrik/errors.hpp"
#include "vofabrik/geometry.hpp"

namespace vofabrik {

/// Rotation of a link relative to its parent link's frame, in radians.
///
/// Yaw turns about the parent's up axis, then pitch tilts about the lateral
/// axis that results from the yaw.
struct JointAngles {
  double pitch = 0.0;
  double yaw = 0.0;

  friend bool operator==(const JointAngles&, const JointAngles&) = default;
};

struct JointLimits {
  double pitch_min = -std::numbers::pi;
  double pitch_max = std::numbers::pi;
  double yaw_min = -std::numbers::pi;
  double yaw_max = std::numbers::pi;

  bool contains(const JointAngles& a, double tolerance = 0.0) const {
    return a.pitch >= pitch_min - tolerance && a.pitch <= pitch_max + tolerance &&
           a.yaw >= yaw_min - tolerance && a.yaw <= yaw_max + tolerance;
  }

  JointAngles clamp(const JointAngles& a) const {
    return {std::clamp(a.pitch, pitch_min, pitch_max), std::clamp(a.yaw, yaw_min, yaw_max)};
  }

  /// Squared Euclidean distance in (pitch, yaw) from `a` to the limit box.
  double squared_distance(const JointAngles& a) const {
    const JointAngles c = clamp(a);
    const double dp = a.pitch - c.pitch;
    const double dy = a.yaw - c.yaw;
    return dp * dp + dy * dy;
  }
};

struct Link {
  double length = 1.0;
  double thickness = 0.0;
};

/// Orthonormal frame attached to a link; `forward` is the link direction.
struct Frame {
  Vec3 forward = Vec3::UnitX();
  Vec3 lateral = Vec3::UnitY();
  Vec3 up = Vec3::UnitZ();
};

/// Immutable description of a serial chain with pitch/yaw joints.
class ChainModel {
public:
  ChainModel(Point3 base, Vec3 base_direction, std::vector<Link> links, std::vector<JointLimits> limits,
             Vec3 world_up = Vec3::UnitZ())
      : base_(std::move(base)),
        base_direction_(std::move(base_direction)),
        world_up_(std::move(world_up)),
        links_(std::move(links)),
        limits_(std::move(limits)) {
    validate();
    const Vec3 up = (world_up_ - world_up_.dot(base_direction_) * base_direction_).normalized();
    base_frame_ = Frame{base_direction_, up.cross(base_direction_), up};
  }

  const Point3& base() const { return base_; }
  const Vec3& base_direction() const { return base_direction_; }
  const Vec3& world_up() const { return world_up_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<JointLimits>& limits() const { return limits_; }
  const Frame& base_frame() const { return base_frame_; }
  std::size_t link_count() const { return links_.size(); }

  double total_length() const {
    double sum = 0.0;
    for (const auto& l : links_) sum += l.length;
    return sum;
  }

private:
  void validate() const {
    if (links_.size() < 2) throw InvalidModel("chain needs at least 2 links");
    if (limits_.size() != links_.size()) throw InvalidModel("limits count must equal link count");
    if (!all_finite(base_) || !all_finite(base_direction_) || !all_finite(world_up_))
      throw InvalidModel("non-finite base, base_direction or world_up");
    if (std::abs(base_direction_.norm() - 1.0) > 1e-12) throw InvalidModel("base_direction must be a unit vector");
    if (world_up_.norm() < 1e-12) throw InvalidModel("world_up must be non-zero");
    if (base_direction_.cross(world_up_.normalized()).norm() < 1e-9)
      throw InvalidModel("base_direction is collinear with world_up");
    for (std::size_t i = 0; i < links_.size(); ++i) {
      if (!(links_[i].length > 0.0) || !std::isfinite(links_[i].length))
        throw InvalidModel("link " + std::to_string(i) + " length must be positive");
      if (!(links_[i].thickness >= 0.0) || !std::isfinite(links_[i].thickness))
        throw InvalidModel("link " + std::to_string(i) + " thickness must be non-negative");
      const auto& l = limits_[i];
      constexpr double pi = std::numbers::pi;
      const bool ordered = -pi <= l.pitch_min && l.pitch_min <= l.pitch_max && l.pitch_max <= pi &&
                           -pi <= l.yaw_min && l.yaw_min <= l.yaw_max && l.yaw_max <= pi;
      if (!ordered) throw InvalidModel("joint " + std::to_string(i) + " limits must satisfy -pi <= min <= max <= pi");
    }
  }

  Point3 base_;
  Vec3 base_direction_;
  Vec3 world_up_;
  std::vector<Link> links_;
  std::vector<JointLimits> limits_;
  Frame base_frame_;
};

/// Joint positions p_0..p_N and the angles that produce them.
struct ChainState {
  std::vector<Point3> positions;
  std::vector<JointAngles> angles;

  const Point3& end_effector() const { return positions.back(); }
};

// Frame algebra ---------------------------------------------------------------

inline Vec3 direction_in(const Frame& f, const JointAngles& a) {
  const double cp = std::cos(a.pitch), sp = std::sin(a.pitch);
  const double cy = std::cos(a.yaw), sy = std::sin(a.yaw);
  return (cp * cy) * f.forward + (cp * sy) * f.lateral + sp * f.up;
}

inline Frame child_frame(const Frame& f, const JointAngles& a) {
  const double cp = std::cos(a.pitch), sp = std::sin(a.pitch);
  const double cy = std::cos(a.yaw), sy = std::sin(a.yaw);
  Frame out;
  out.forward = (cp * cy) * f.forward + (cp * sy) * f.lateral + sp * f.up;
  out.lateral = cy * f.lateral - sy * f.forward;
  out.up = (-sp * cy) * f.forward - (sp * sy) * f.lateral + cp * f.up;
  return out;
}

/// Pitch/yaw of unit direction `d` in frame `f`.
///
/// Every direction has two representations, the principal one with pitch in
/// [-pi/2, pi/2] and its fold (yaw + pi, pi - pitch). The one closer to
/// `limits` is returned, the principal one on ties.
inline JointAngles decompose(const Frame& f, const Vec3& d, const JointLimits& limits) {
  const double a = d.dot(f.forward);
  const double b = d.dot(f.lateral);
  const double c = d.dot(f.up);
  const JointAngles principal{std::atan2(c, std::hypot(a, b)), std::atan2(b, a)};
  constexpr double pi = std::numbers::pi;
  const JointAngles folded{principal.pitch >= 0.0 ? pi - principal.pitch : -pi - principal.pitch,
                           principal.yaw > 0.0 ? principal.yaw - pi : principal.yaw + pi};
  const double dp = limits.squared_distance(principal);
  if (dp == 0.0) return principal;
  return limits.squared_distance(folded) < dp ? folded : principal;
}

/// World frames of every link for the given angles (frame i is link i's).
inline std::vector<Frame> link_frames(const ChainModel& model, std::span<const JointAngles> angles) {
  std::vector<Frame> frames;
  frames.reserve(angles.size());
  Frame parent = model.base_frame();
  for (const auto& a : angles) {
    parent = child_frame(parent, a);
    frames.push_back(parent);
  }
  return frames;
}

/// Parent frame of link `i` given precomputed link frames.
inline const Frame& parent_frame(const ChainModel& model, const std::vector<Frame>& frames, std::size_t i) {
  return i == 0 ? model.base_frame() : frames[i - 1];
}

// Forward kinematics ----------------------------------------------------------

enum class LimitCheck { Strict, None };

inline std::vector<Point3> fk(const ChainModel& model, std::span<const JointAngles> angles,
                              LimitCheck check = LimitCheck::Strict, double tolerance = 1e-9) {
  if (angles.size() != model.link_count()) throw InvalidModel("angle count must equal link count");
  std::vector<Point3> positions;
  positions.reserve(angles.size() + 1);
  positions.push_back(model.base());
  Frame parent = model.base_frame();
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (check == LimitCheck::Strict && !model.limits()[i].contains(angles[i], tolerance)) throw AngleOutOfLimits(i);
    parent = child_frame(parent, angles[i]);
    positions.push_back(positions.back() + model.links()[i].length * parent.forward);
  }
  return positions;
}

inline ChainState make_state(const ChainModel& model, std::vector<JointAngles> angles) {
  ChainState s;
  s.positions = fk(model, angles);
  s.angles = std::move(angles);
  return s;
}

/// Recovers joint angles from link extremity positions.
inline std::vector<JointAngles> angles_from_positions(const ChainModel& model, std::span<const Point3> positions) {
  const std::size_t n = model.link_count();
  if (positions.size() != n + 1) throw InconsistentPositions("expected " + std::to_string(n + 1) + " positions");
  constexpr double singular = 1e-9;  // chord length, equal to the angle at this scale
  std::vector<JointAngles> angles;
  angles.reserve(n);
  Frame parent = model.base_frame();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 delta = positions[i + 1] - positions[i];
    const double len = delta.norm();
    if (std::abs(len - model.links()[i].length) > 1e-6)
      throw InconsistentPositions("link " + std::to_string(i) + " length differs from the model");
    const Vec3 d = delta / len;
    // Antiparallel fold, and the pitch = +-pi/2 pole where yaw is undefined.
    if ((d + parent.forward).norm() < singular || (d - parent.up).norm() < singular ||
        (d + parent.up).norm() < singular)
      throw GimbalSingularity(i);
    const JointAngles a = decompose(parent, d, model.limits()[i]);
    angles.push_back(a);
    parent = child_frame(parent, a);
  }
  return angles;
}

inline std::vector<Capsule3> link_capsules(const ChainModel& model, const ChainState& state) {
  std::vector<Capsule3> out;
  out.reserve(model.link_count());
  for (std::size_t i = 0; i < model.link_count(); ++i)
    out.push_back({{state.positions[i], state.positions[i + 1]}, model.links()[i].thickness});
  return out;
}

}  // namespace vofabrik
