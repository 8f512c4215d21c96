#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vofabrik/chain.hpp"
#include "vofabrik/errors.hpp"
#include "vofabrik/geometry.hpp"

namespace vofabrik {

struct FabrikConfig {
  double epsilon = 1e-3;
  int max_iterations = 100;
  double limit_tolerance = 1e-9;
};

enum class SolveStatus { Converged, MaxIterations, Infeasible };

struct SolveOutcome {
  SolveStatus status = SolveStatus::MaxIterations;
  ChainState state;
  int iterations = 0;
  double residual = 0.0;
};

/// Half of a FABRIK iteration: Backward anchors the tip, Forward the base.
enum class Phase { Backward, Forward };

/// Places the parent end of a link at `link_length` from the already moved
/// child end, along the line towards its previous position.
inline Point3 backward_step(const Point3& p_child_new, const Point3& p_current_old, double link_length) {
  const Vec3 delta = p_current_old - p_child_new;
  const double n = delta.norm();
  if (n < 1e-12) throw DegenerateDirection();
  return p_child_new + link_length * (delta / n);
}

/// Mirror of backward_step, reaching away from the base.
inline Point3 forward_step(const Point3& p_parent_new, const Point3& p_current_old, double link_length) {
  const Vec3 delta = p_current_old - p_parent_new;
  const double n = delta.norm();
  if (n < 1e-12) throw DegenerateDirection();
  return p_parent_new + link_length * (delta / n);
}

/// What a joint-angle selection policy gets to see for one link visit.
struct LinkVisit {
  const ChainModel& model;
  std::span<const Point3> positions;  // working positions, mid-sweep
  std::size_t link;
  Phase phase;
  const Frame& parent;  // frame the joint angles are measured in
  const Point3& pivot;  // fixed end of the link during this visit
};

/// Plain FABRIK angle selection: clamp each axis into the joint limits.
struct ClampToLimits {
  JointAngles operator()(const LinkVisit& v, const JointAngles& desired) const {
    return v.model.limits()[v.link].clamp(desired);
  }
};

namespace detail {

// Coincident points keep the link's previous direction.
inline Vec3 backward_direction(const Point3& pivot, const Point3& old_end, double length, const Vec3& previous) {
  try {
    return (pivot - backward_step(pivot, old_end, length)) / length;
  } catch (const DegenerateDirection&) {
    return previous;
  }
}

inline Vec3 forward_direction(const Point3& pivot, const Point3& old_end, double length, const Vec3& previous) {
  try {
    return (forward_step(pivot, old_end, length) - pivot) / length;
  } catch (const DegenerateDirection&) {
    return previous;
  }
}

}  // namespace detail

/// FABRIK with a pluggable per-link angle selection.
///
/// Each link visit converts the unconstrained direction into joint angles in
/// the parent frame, asks `select` for the admissible angles and re-places
/// the free end at link length. In the backward phase the parent frame is
/// the one stored at the start of the iteration; the forward phase rebuilds
/// frames from the base, so the returned angles and positions agree exactly
/// with fk().
template <class Select>
SolveOutcome fabrik_solve_with(const ChainModel& model, const ChainState& state, const Point3& target,
                               const FabrikConfig& cfg, Select&& select) {
  const std::size_t n = model.link_count();
  SolveOutcome out;
  out.state = state;
  out.residual = (state.end_effector() - target).norm();
  if (out.residual < cfg.epsilon) {
    out.status = SolveStatus::Converged;
    return out;
  }

  std::vector<Point3>& p = out.state.positions;
  std::vector<JointAngles>& angles = out.state.angles;
  const auto& links = model.links();

  // At or beyond full reach: one base-first pass pointing every link at the
  // target.
  const double reach = (target - model.base()).norm();
  if (reach >= model.total_length()) {
    const std::vector<Frame> stored = link_frames(model, angles);
    Frame parent = model.base_frame();
    for (std::size_t k = 0; k < n; ++k) {
      const Point3 pivot = p[k];
      const Vec3 dir = detail::forward_direction(pivot, target, links[k].length, stored[k].forward);
      const JointAngles desired = decompose(parent, dir, model.limits()[k]);
      const JointAngles chosen = select(LinkVisit{model, p, k, Phase::Forward, parent, pivot}, desired);
      angles[k] = chosen;
      parent = child_frame(parent, chosen);
      p[k + 1] = p[k] + links[k].length * parent.forward;
    }
    out.iterations = 1;
    out.residual = (p[n] - target).norm();
    out.status = out.residual < cfg.epsilon ? SolveStatus::Converged : SolveStatus::Infeasible;
    return out;
  }

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    const std::vector<Frame> stored = link_frames(model, angles);

    p[n] = target;
    for (std::size_t k = n; k-- > 0;) {
      const Point3 pivot = p[k + 1];
      const Frame& parent = parent_frame(model, stored, k);
      const Vec3 dir = detail::backward_direction(pivot, p[k], links[k].length, stored[k].forward);
      const JointAngles desired = decompose(parent, dir, model.limits()[k]);
      const JointAngles chosen = select(LinkVisit{model, p, k, Phase::Backward, parent, pivot}, desired);
      p[k] = pivot - links[k].length * direction_in(parent, chosen);
    }

    p[0] = model.base();
    Frame parent = model.base_frame();
    for (std::size_t k = 0; k < n; ++k) {
      const Point3 pivot = p[k];
      const Vec3 dir = detail::forward_direction(pivot, p[k + 1], links[k].length, stored[k].forward);
      const JointAngles desired = decompose(parent, dir, model.limits()[k]);
      const JointAngles chosen = select(LinkVisit{model, p, k, Phase::Forward, parent, pivot}, desired);
      angles[k] = chosen;
      parent = child_frame(parent, chosen);
      p[k + 1] = p[k] + links[k].length * parent.forward;
    }

    out.iterations = iter;
    out.residual = (p[n] - target).norm();
    if (out.residual < cfg.epsilon) {
      out.status = SolveStatus::Converged;
      return out;
    }
  }
  out.status = SolveStatus::MaxIterations;
  return out;
}

/// Plain FABRIK towards `target` with per-axis joint-limit clamping.
inline SolveOutcome solve(const ChainModel& model, const ChainState& state, const Point3& target,
                          const FabrikConfig& cfg = {}) {
  return fabrik_solve_with(model, state, target, cfg, ClampToLimits{});
}

}  // namespace vofabrik
