#pragma once

#include <algorithm>
#include <limits>
#include <tuple>
#include <vector>

#include "vofabrik/chain.hpp"
#include "vofabrik/errors.hpp"

namespace vofabrik {

/// Closed axis-aligned box in (pitch, yaw) space. Either side may have zero
/// width, which is how a locked joint axis is represented.
struct AngleRect {
  double pitch_lo = 0.0;
  double pitch_hi = 0.0;
  double yaw_lo = 0.0;
  double yaw_hi = 0.0;

  static AngleRect from_limits(const JointLimits& l) { return {l.pitch_min, l.pitch_max, l.yaw_min, l.yaw_max}; }

  bool contains(const JointAngles& a) const {
    return a.pitch >= pitch_lo && a.pitch <= pitch_hi && a.yaw >= yaw_lo && a.yaw <= yaw_hi;
  }

  JointAngles clamp(const JointAngles& a) const {
    return {std::clamp(a.pitch, pitch_lo, pitch_hi), std::clamp(a.yaw, yaw_lo, yaw_hi)};
  }

  friend bool operator==(const AngleRect&, const AngleRect&) = default;
};

namespace detail {

// Interval intersection with positive measure, or a point interval lying in
// the other interval.
inline bool axis_overlap(double a_lo, double a_hi, double b_lo, double b_hi) {
  if (a_lo == a_hi) return b_lo <= a_lo && a_lo <= b_hi;
  if (b_lo == b_hi) return a_lo <= b_lo && b_lo <= a_hi;
  return b_lo < a_hi && b_hi > a_lo;
}

}  // namespace detail

/// Union of rectangles with pairwise disjoint interiors.
struct AngularRegion {
  std::vector<AngleRect> rects;

  static AngularRegion from_limits(const JointLimits& l) { return {{AngleRect::from_limits(l)}}; }

  bool empty() const { return rects.empty(); }

  bool contains(const JointAngles& a) const {
    return std::any_of(rects.begin(), rects.end(), [&](const AngleRect& r) { return r.contains(a); });
  }

  /// Removes `cut` from every rectangle. Pieces keep their shared boundary
  /// with `cut`, so the result is the closure of the set difference.
  void subtract(const AngleRect& cut) {
    std::vector<AngleRect> out;
    out.reserve(rects.size() + 3);
    for (const AngleRect& r : rects) {
      if (!detail::axis_overlap(r.pitch_lo, r.pitch_hi, cut.pitch_lo, cut.pitch_hi) ||
          !detail::axis_overlap(r.yaw_lo, r.yaw_hi, cut.yaw_lo, cut.yaw_hi)) {
        out.push_back(r);
        continue;
      }
      if (cut.pitch_lo > r.pitch_lo) out.push_back({r.pitch_lo, cut.pitch_lo, r.yaw_lo, r.yaw_hi});
      if (cut.pitch_hi < r.pitch_hi) out.push_back({cut.pitch_hi, r.pitch_hi, r.yaw_lo, r.yaw_hi});
      const double mid_lo = std::max(r.pitch_lo, cut.pitch_lo);
      const double mid_hi = std::min(r.pitch_hi, cut.pitch_hi);
      if (cut.yaw_lo > r.yaw_lo) out.push_back({mid_lo, mid_hi, r.yaw_lo, cut.yaw_lo});
      if (cut.yaw_hi < r.yaw_hi) out.push_back({mid_lo, mid_hi, cut.yaw_hi, r.yaw_hi});
    }
    rects = std::move(out);
  }

  void subtract(const AngularRegion& cut) {
    for (const auto& r : cut.rects) subtract(r);
  }
};

/// Nearest point of `safe` to `desired`; `desired` itself when it is safe.
///
/// Ties on distance go to the smaller pitch, then the smaller yaw.
inline JointAngles compute_safe(const AngularRegion& safe, const JointAngles& desired) {
  if (safe.empty()) throw SafeSetEmpty();
  if (safe.contains(desired)) return desired;
  JointAngles best{};
  auto best_key = std::make_tuple(std::numeric_limits<double>::infinity(), 0.0, 0.0);
  for (const AngleRect& r : safe.rects) {
    const JointAngles c = r.clamp(desired);
    const double dp = c.pitch - desired.pitch;
    const double dy = c.yaw - desired.yaw;
    const auto key = std::make_tuple(dp * dp + dy * dy, c.pitch, c.yaw);
    if (key < best_key) {
      best_key = key;
      best = c;
    }
  }
  return best;
}

}  // namespace vofabrik
