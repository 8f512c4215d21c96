#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "vofabrik/angular_region.hpp"
#include "vofabrik/chain.hpp"
#include "vofabrik/errors.hpp"
#include "vofabrik/fabrik.hpp"
#include "vofabrik/geometry.hpp"
#include "vofabrik/velocity_obstacles.hpp"

namespace vofabrik {

struct PlannerConfig {
  double t_s = 0.2;
  double v_pref_speed = 0.1;
  double goal_tolerance = 5e-3;
  int max_steps = 2000;
  int stall_window = 25;
  double stall_displacement = 1e-3;
  double angular_resolution = std::numbers::pi / 360.0;
  double clearance_margin = 5e-3;
  int max_step_halvings = 4;
  FabrikConfig ik;
  VOConfig vo;
};

enum class PlanStatus { GoalReached, Stalled, StepLimit, SafeSetEmpty, NoAdmissibleVelocity };

struct StepMetrics {
  /// |delta| per joint axis, laid out pitch_0, yaw_0, pitch_1, ...
  std::vector<double> joint_displacements;
  double wall_time = 0.0;
  double min_clearance = std::numeric_limits<double>::infinity();
};

struct PlanOutcome {
  PlanStatus status = PlanStatus::StepLimit;
  std::vector<ChainState> trajectory;
  std::vector<StepMetrics> per_step_metrics;
  std::optional<std::size_t> failed_link;
};

// Self-collision virtual obstacles ---------------------------------------------

namespace detail {

inline void append_link_spheres(const ChainModel& model, std::span<const Point3> positions, const Point3& pivot,
                                std::size_t first, std::size_t last, std::vector<SphereObstacle>& out) {
  for (std::size_t j = first; j < last; ++j) {
    const Point3 c = closest_point_on_segment(pivot, {positions[j], positions[j + 1]});
    out.push_back({c, model.links()[j].thickness, Vec3::Zero()});
  }
}

}  // namespace detail

/// Spheres standing in for the links that the current sweep has not reached
/// yet, each at the point of that link closest to the visited link's pivot.
/// The neighbour sharing the pivot's joint is skipped.
inline std::vector<SphereObstacle> virtual_obstacles(const ChainModel& model, std::span<const Point3> positions,
                                                     std::size_t link_index, Phase phase) {
  std::vector<SphereObstacle> out;
  const std::size_t n = model.link_count();
  if (phase == Phase::Backward) {
    if (link_index >= 2) detail::append_link_spheres(model, positions, positions[link_index + 1], 0, link_index - 1, out);
  } else if (link_index + 2 < n) {
    detail::append_link_spheres(model, positions, positions[link_index], link_index + 2, n, out);
  }
  return out;
}

inline std::vector<SphereObstacle> virtual_obstacles(const ChainModel& model, const ChainState& state,
                                                     std::size_t link_index, Phase phase) {
  return virtual_obstacles(model, state.positions, link_index, phase);
}

// Cone to joint-angle constraints ----------------------------------------------

/// A link pivoting about one of its ends. `reach` is +1 when the link extends
/// along the joint direction from the pivot (forward phase) and -1 when the
/// pivot is the link's far end (backward phase).
struct LinkSweep {
  Point3 pivot = Point3::Zero();
  Frame frame;
  double length = 1.0;
  double reach = 1.0;
};

namespace detail {

struct AxisGrid {
  double lo = 0.0;
  double hi = 0.0;
  int cells = 1;
  double width = 0.0;

  AxisGrid(double lo_, double hi_, double resolution) : lo(lo_), hi(hi_) {
    if (hi > lo) {
      cells = std::max(1, static_cast<int>(std::ceil((hi - lo) / resolution - 1e-9)));
      width = (hi - lo) / cells;
    }
  }
  double edge(int k) const { return k >= cells ? hi : lo + k * width; }
  double center(int k) const { return width == 0.0 ? lo : lo + (k + 0.5) * width; }
};

}  // namespace detail

namespace detail {

// True when `a` (modulo 2 pi) lies in [lo, hi].
inline bool angle_in(double a, double lo, double hi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double shifted = lo + std::fmod(std::fmod(a - lo, two_pi) + two_pi, two_pi);
  return shifted <= hi;
}

// Largest value of R cos(x - phase) over [lo, hi].
inline double max_cosine(double amplitude, double phase, double lo, double hi) {
  double best = std::max(amplitude * std::cos(lo - phase), amplitude * std::cos(hi - phase));
  if (angle_in(phase, lo, hi)) best = std::max(best, amplitude);
  if (angle_in(phase + std::numbers::pi, lo, hi)) best = std::max(best, -amplitude);
  return best;
}

// Largest projection of a joint direction onto (cf, cl, cu) over the cell
// [p0, p1] x [y0, y1].
inline double cell_max_projection(double cf, double cl, double cu, double p0, double p1, double y0, double y1) {
  const double norm = std::sqrt(cf * cf + cl * cl + cu * cu);
  const double horiz = std::hypot(cf, cl);
  const double yc = std::atan2(cl, cf);
  const double pc = std::asin(std::clamp(cu / norm, -1.0, 1.0));
  constexpr double pi = std::numbers::pi;
  const bool yaw_in = angle_in(yc, y0, y1);
  const bool yaw_back = angle_in(yc + pi, y0, y1);
  if ((yaw_in && pc >= p0 && pc <= p1) || (yaw_back && ((pi - pc >= p0 && pi - pc <= p1) ||
                                                         (-pi - pc >= p0 && -pi - pc <= p1))))
    return norm;

  double best = -norm;
  for (double p : {p0, p1}) best = std::max(best, max_cosine(std::cos(p) * horiz, yc, y0, y1) + std::sin(p) * cu);
  for (double y : {y0, y1}) {
    const double b = horiz * std::cos(y - yc);
    best = std::max(best, max_cosine(std::hypot(b, cu), std::atan2(cu, b), p0, p1));
  }
  for (double pole : {-pi / 2, pi / 2})
    if (pole >= p0 && pole <= p1) best = std::max(best, std::sin(pole) * cu);
  return best;
}

}  // namespace detail

/// Joint angles (within `limits`) whose link placement would touch the
/// sphere generating `cone`.
///
/// The limits are split into a grid no coarser than `resolution`. A cell is
/// forbidden when any direction inside it brings the link centreline within
/// the cone's combined radius of the sphere centre. Along a sweep that
/// distance only depends on the projection of the link direction onto the
/// centre, so each cell is decided by the largest projection it attains.
/// Forbidden cells are merged into rectangles.
inline AngularRegion cone_to_angular_constraints(const CollisionCone& cone, const LinkSweep& sweep,
                                                 const JointLimits& limits, double resolution) {
  AngularRegion forbidden;
  const double dist = cone.truncation_distance;
  const double r = cone.combined_radius;
  const double len = sweep.length;
  if (dist - r >= len) return forbidden;

  // Projections above `threshold` collide.
  double threshold = -std::numeric_limits<double>::infinity();
  if (dist > r) {
    const double tangent = std::sqrt(dist * dist - r * r);
    threshold = tangent <= len ? tangent : (dist * dist + len * len - r * r) / (2.0 * len);
  }
  const double cap = threshold <= -dist ? std::numbers::pi : std::acos(std::clamp(threshold / dist, -1.0, 1.0));

  const detail::AxisGrid pg(limits.pitch_min, limits.pitch_max, resolution);
  const detail::AxisGrid yg(limits.yaw_min, limits.yaw_max, resolution);
  const Vec3 to_center = cone.axis * dist;
  // Components of the sphere centre in the (signed) frame.
  const double cf = sweep.reach * to_center.dot(sweep.frame.forward);
  const double cl = sweep.reach * to_center.dot(sweep.frame.lateral);
  const double cu = sweep.reach * to_center.dot(sweep.frame.up);

  std::vector<double> cp(pg.cells), sp(pg.cells), cy(yg.cells), sy(yg.cells);
  for (int i = 0; i < pg.cells; ++i) cp[i] = std::cos(pg.center(i)), sp[i] = std::sin(pg.center(i));
  for (int j = 0; j < yg.cells; ++j) cy[j] = std::cos(yg.center(j)), sy[j] = std::sin(yg.center(j));

  std::vector<char> cells(static_cast<std::size_t>(pg.cells) * yg.cells, 0);
  auto at = [&](int i, int j) -> char& { return cells[static_cast<std::size_t>(i) * yg.cells + j]; };
  bool any = false;

  // A point of a cell lies within the half diagonal of its centre on the
  // sphere; blocks of cells use the same bound.
  auto off_axis = [&](double p, double y) {
    const double c = std::cos(p);
    return std::acos(std::clamp((c * std::cos(y) * cf + c * std::sin(y) * cl + std::sin(p) * cu) / dist, -1.0, 1.0));
  };
  const double cell_radius = 0.5 * std::hypot(pg.width, yg.width) + 1e-12;
  constexpr int block = 8;
  for (int bi = 0; bi < pg.cells; bi += block) {
    const int ie = std::min(pg.cells, bi + block);
    const double p_lo = pg.edge(bi), p_hi = pg.edge(ie);
    for (int bj = 0; bj < yg.cells; bj += block) {
      const int je = std::min(yg.cells, bj + block);
      const double y_lo = yg.edge(bj), y_hi = yg.edge(je);
      const double spread = 0.5 * std::hypot(p_hi - p_lo, y_hi - y_lo) + 1e-12;
      if (off_axis(0.5 * (p_lo + p_hi), 0.5 * (y_lo + y_hi)) - spread > cap) continue;
      for (int i = bi; i < ie; ++i) {
        for (int j = bj; j < je; ++j) {
          const double centre = cp[i] * cy[j] * cf + cp[i] * sy[j] * cl + sp[i] * cu;
          bool hit = centre > threshold;
          if (!hit && std::acos(std::clamp(centre / dist, -1.0, 1.0)) - cell_radius <= cap)
            hit = detail::cell_max_projection(cf, cl, cu, pg.edge(i), pg.edge(i + 1), yg.edge(j), yg.edge(j + 1)) >
                  threshold - 1e-12 * dist;
          if (hit) {
            at(i, j) = 1;
            any = true;
          }
        }
      }
    }
  }
  if (!any) return forbidden;

  // Row runs merged with identical runs of the following rows.
  struct Run {
    int j0, j1, i0;
  };
  std::vector<Run> open;
  auto close = [&](const Run& run, int i_end) {
    forbidden.rects.push_back({pg.edge(run.i0), pg.edge(i_end), yg.edge(run.j0), yg.edge(run.j1)});
  };
  for (int i = 0; i <= pg.cells; ++i) {
    std::vector<std::pair<int, int>> runs;
    if (i < pg.cells) {
      for (int j = 0; j < yg.cells;) {
        if (!cells[static_cast<std::size_t>(i) * yg.cells + j]) {
          ++j;
          continue;
        }
        int k = j;
        while (k < yg.cells && cells[static_cast<std::size_t>(i) * yg.cells + k]) ++k;
        runs.emplace_back(j, k);
        j = k;
      }
    }
    std::vector<Run> next;
    for (const Run& run : open) {
      const auto same = std::find(runs.begin(), runs.end(), std::make_pair(run.j0, run.j1));
      if (same != runs.end()) {
        next.push_back(run);
        runs.erase(same);
      } else {
        close(run, i);
      }
    }
    for (const auto& [j0, j1] : runs) next.push_back({j0, j1, i});
    open = std::move(next);
  }
  return forbidden;
}

// IK phase ---------------------------------------------------------------------

namespace detail {

/// Angle selection for one link visit: joint limits minus the forbidden
/// regions of every real obstacle and every non-adjacent link.
///
/// Links already placed in the current half-iteration are binding; a pivot
/// overlapping one of them (or a real obstacle) leaves no safe angle. Links
/// still waiting to be moved only shape the choice. The backward phase is
/// advisory, so an empty safe set there falls back to plain clamping.
class SafeAngleSelect {
public:
  SafeAngleSelect(std::span<const SphereObstacle> obstacles, const PlannerConfig& cfg)
      : obstacles_(obstacles), cfg_(cfg) {}

  JointAngles operator()(const LinkVisit& v, const JointAngles& desired) const {
    const auto& limits = v.model.limits()[v.link];
    const Link& link = v.model.links()[v.link];
    const bool forward = v.phase == Phase::Forward;
    const LinkSweep sweep{v.pivot, v.parent, link.length, forward ? 1.0 : -1.0};

    AngularRegion safe = AngularRegion::from_limits(limits);
    bool constrained = false;
    bool pivot_blocked = false;
    auto add = [&](SphereObstacle ob, bool binding) {
      ob.radius += cfg_.clearance_margin;
      CollisionCone cone;
      try {
        cone = collision_cone(v.pivot, link.thickness, ob);
      } catch (const AlreadyInCollision&) {
        pivot_blocked = pivot_blocked || binding;
        return;
      }
      const AngularRegion cut = cone_to_angular_constraints(cone, sweep, limits, cfg_.angular_resolution);
      if (!cut.empty()) {
        safe.subtract(cut);
        constrained = true;
      }
    };

    for (const auto& ob : obstacles_) add(ob, true);
    // Links not yet visited in this half-iteration.
    for (const auto& ob : virtual_obstacles(v.model, v.positions, v.link, v.phase)) add(ob, false);
    // Links already placed in this half-iteration.
    placed_.clear();
    const std::size_t n = v.model.link_count();
    if (forward) {
      if (v.link >= 2) append_link_spheres(v.model, v.positions, v.pivot, 0, v.link - 1, placed_);
    } else if (v.link + 2 < n) {
      append_link_spheres(v.model, v.positions, v.pivot, v.link + 2, n, placed_);
    }
    for (const auto& ob : placed_) add(ob, true);

    if (pivot_blocked || (constrained && safe.empty())) {
      if (forward) throw SafeSetEmpty(v.link);
      return limits.clamp(desired);
    }
    if (!constrained) return limits.clamp(desired);
    return compute_safe(safe, desired);
  }

private:
  std::span<const SphereObstacle> obstacles_;
  const PlannerConfig& cfg_;
  mutable std::vector<SphereObstacle> placed_;
};

}  // namespace detail

/// One FABRIK solve in which every link visit avoids real obstacles and the
/// rest of the chain. Throws SafeSetEmpty when a forward-phase link has no
/// admissible angle.
inline SolveOutcome ik_phase(const ChainModel& model, const ChainState& state, const Point3& target_pn,
                             std::span<const SphereObstacle> obstacles, const PlannerConfig& cfg) {
  return fabrik_solve_with(model, state, target_pn, cfg.ik, detail::SafeAngleSelect(obstacles, cfg));
}

// Motion planning phase ----------------------------------------------------------

/// Smallest signed clearance between any link capsule and a real obstacle,
/// or between two links that do not share a joint.
inline double min_clearance(const ChainModel& model, const ChainState& state,
                            std::span<const SphereObstacle> obstacles) {
  const auto caps = link_capsules(model, state);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : caps)
    for (const auto& o : obstacles) best = std::min(best, capsule_sphere_distance(c, o.center, o.radius));
  for (std::size_t i = 0; i < caps.size(); ++i)
    for (std::size_t j = i + 2; j < caps.size(); ++j) best = std::min(best, capsule_capsule_distance(caps[i], caps[j]));
  return best;
}

enum class Solver { VoFabrik, PlainFabrik };

/// Obstacles advanced along their constant velocities to time `t`.
inline std::vector<SphereObstacle> obstacles_at(std::span<const SphereObstacle> obstacles, double t) {
  std::vector<SphereObstacle> out(obstacles.begin(), obstacles.end());
  for (auto& o : out) o.center += t * o.velocity;
  return out;
}

namespace detail {

inline std::vector<double> axis_displacements(const ChainState& from, const ChainState& to) {
  std::vector<double> out;
  out.reserve(2 * from.angles.size());
  for (std::size_t i = 0; i < from.angles.size(); ++i) {
    out.push_back(std::abs(to.angles[i].pitch - from.angles[i].pitch));
    out.push_back(std::abs(to.angles[i].yaw - from.angles[i].yaw));
  }
  return out;
}

}  // namespace detail

/// Steps the end effector towards `goal` at the preferred speed.
///
/// VoFabrik deflects the end-effector velocity out of the obstacles' cones,
/// solves each step with ik_phase and only accepts collision-free results,
/// halving the step on failure. PlainFabrik heads straight for the goal with
/// the unconstrained solver and accepts whatever it returns.
inline PlanOutcome plan(const ChainModel& model, const ChainState& initial_state, const Point3& goal,
                        std::span<const SphereObstacle> obstacles, const PlannerConfig& cfg,
                        Solver solver = Solver::VoFabrik) {
  using clock = std::chrono::steady_clock;
  const double initial_clearance = min_clearance(model, initial_state, obstacles);
  if (!(initial_clearance > 0.0))
    throw InitialStateInCollision("initial state clearance " + std::to_string(initial_clearance) + " m");

  PlanOutcome out;
  out.trajectory.push_back(initial_state);
  out.per_step_metrics.push_back({std::vector<double>(2 * model.link_count(), 0.0), 0.0, initial_clearance});

  const double agent_radius = model.links().back().thickness;
  const double max_displacement = cfg.v_pref_speed * cfg.t_s + cfg.ik.epsilon;

  for (int step = 1;; ++step) {
    const ChainState& current = out.trajectory.back();
    const Point3 ee = current.end_effector();
    const double remaining = (goal - ee).norm();
    if (remaining <= cfg.goal_tolerance) {
      out.status = PlanStatus::GoalReached;
      return out;
    }
    if (step > cfg.max_steps) {
      out.status = PlanStatus::StepLimit;
      return out;
    }

    const auto started = clock::now();
    const auto now = obstacles_at(obstacles, (step - 1) * cfg.t_s);
    const auto next = obstacles_at(obstacles, step * cfg.t_s);
    const Vec3 v_pref = cfg.v_pref_speed * (goal - ee) / remaining;
    Vec3 velocity = v_pref;
    if (solver == Solver::VoFabrik) {
      std::vector<CollisionCone> cones;
      try {
        for (const auto& o : now) {
          SphereObstacle inflated = o;
          inflated.radius += cfg.clearance_margin;
          cones.push_back(collision_cone(ee, agent_radius, inflated));
        }
        velocity = admissible_velocity(v_pref, cones, cfg.vo);
      } catch (const Error&) {
        out.status = PlanStatus::NoAdmissibleVelocity;
        return out;
      }
    }
    const double dt = std::min(cfg.t_s, remaining / cfg.v_pref_speed);

    std::optional<ChainState> accepted;
    std::optional<std::size_t> empty_link;
    double clearance = 0.0;
    if (solver == Solver::PlainFabrik) {
      accepted = solve(model, current, ee + velocity * dt, cfg.ik).state;
      clearance = min_clearance(model, *accepted, next);
    } else {
      double scale = 1.0;
      for (int attempt = 0; attempt <= cfg.max_step_halvings && !accepted; ++attempt, scale *= 0.5) {
        try {
          SolveOutcome r = ik_phase(model, current, ee + velocity * (dt * scale), next, cfg);
          empty_link.reset();
          if (r.status == SolveStatus::Infeasible) continue;
          if ((r.state.end_effector() - ee).norm() > max_displacement) continue;
          clearance = min_clearance(model, r.state, next);
          if (clearance > 0.0) accepted = std::move(r.state);
        } catch (const SafeSetEmpty& e) {
          empty_link = e.link();
        }
      }
    }
    const double elapsed = std::chrono::duration<double>(clock::now() - started).count();

    if (!accepted) {
      if (empty_link) {
        out.status = PlanStatus::SafeSetEmpty;
        out.failed_link = empty_link;
      } else {
        out.status = PlanStatus::Stalled;
      }
      return out;
    }
    out.per_step_metrics.push_back({detail::axis_displacements(current, *accepted), elapsed, clearance});
    out.trajectory.push_back(std::move(*accepted));

    const auto window = static_cast<std::size_t>(cfg.stall_window);
    const std::size_t last = out.trajectory.size() - 1;
    if (last >= window && (out.trajectory[last].end_effector() - out.trajectory[last - window].end_effector()).norm() <
                              cfg.stall_displacement) {
      out.status = PlanStatus::Stalled;
      return out;
    }
  }
}

}  // namespace vofabrik
