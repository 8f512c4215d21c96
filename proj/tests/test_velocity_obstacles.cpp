#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"
#include "vofabrik/velocity_obstacles.hpp"

using namespace vofabrik;

namespace {

double angle(const Vec3& a, const Vec3& b) { return std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0)); }

// Random direction within `spread` radians of `axis`.
Vec3 near_axis(std::mt19937_64& rng, const Vec3& axis, double spread) {
  std::uniform_real_distribution<double> u(0, 1);
  const Vec3 any = oracle::random_unit(rng);
  const Vec3 perp = (any - any.dot(axis) * axis).normalized();
  const double a = spread * u(rng);
  return std::cos(a) * axis + std::sin(a) * perp;
}

}  // namespace

TEST(CollisionCone, ClosedFormHalfAngle) {
  const auto cone = collision_cone({0, 0, 0}, 0.1, {{2, 0, 0}, 0.3, Vec3::Zero()});
  EXPECT_EQ(cone.axis, Vec3(1, 0, 0));
  EXPECT_NEAR(cone.half_angle, 0.20135792079033080, 1e-15);
  EXPECT_EQ(cone.truncation_distance, 2.0);
  EXPECT_NEAR(cone.combined_radius, 0.4, 1e-15);
}

TEST(CollisionCone, HalfAngleMatchesSimulatedGrazingDirection) {
  // Bisect for the widest direction that still collides within a long horizon.
  const Point3 obstacle(2, 0, 0);
  double lo = 0.0, hi = oracle::kPi / 2;
  for (int i = 0; i < 30; ++i) {
    const double mid = 0.5 * (lo + hi);
    const Vec3 v(std::cos(mid), std::sin(mid), 0);
    (oracle::simulated_collision({0, 0, 0}, 0.1, v, obstacle, 0.3, Vec3::Zero(), 10.0) ? lo : hi) = mid;
  }
  EXPECT_NEAR(collision_cone({0, 0, 0}, 0.1, {obstacle, 0.3, Vec3::Zero()}).half_angle, lo, 1e-3);
}

TEST(CollisionCone, DegenerateLimits) {
  EXPECT_NEAR(collision_cone({0, 0, 0}, 0.0, {{5, 0, 0}, 1e-12, Vec3::Zero()}).half_angle, 0.0, 1e-12);
  EXPECT_NEAR(collision_cone({0, 0, 0}, 0.1, {{0.4 + 1e-12, 0, 0}, 0.3, Vec3::Zero()}).half_angle, oracle::kPi / 2,
              1e-5);
}

TEST(CollisionCone, OverlapIsAlreadyInCollision) {
  EXPECT_THROW(collision_cone({0, 0, 0}, 0.1, {{0.4, 0, 0}, 0.3, Vec3::Zero()}), AlreadyInCollision);
  EXPECT_THROW(collision_cone({0, 0, 0}, 0.1, {{0.2, 0, 0}, 0.3, Vec3::Zero()}), AlreadyInCollision);
}

TEST(InCone, CentreRayThatReachesIsInside) {
  const auto cone = collision_cone({0, 0, 0}, 0.1, {{2, 0, 0}, 0.3, Vec3::Zero()});
  const VOConfig cfg{1.0, 1e-3, 2048};
  EXPECT_TRUE(in_cone({1.61, 0, 0}, cone, cfg));
  EXPECT_FALSE(in_cone({1.5, 0, 0}, cone, cfg));  // stops short within the horizon
}

TEST(InCone, PerpendicularIsOutside) {
  const auto cone = collision_cone({0, 0, 0}, 0.1, {{2, 0, 0}, 0.3, Vec3::Zero()});
  EXPECT_FALSE(in_cone({0, 100, 0}, cone, {}));
  EXPECT_FALSE(in_cone({0, 0, 0}, cone, {}));
}

TEST(InCone, ApexShiftsWithObstacleVelocity) {
  const auto cone = collision_cone({0, 0, 0}, 0.1, {{2, 0, 0}, 0.3, Vec3(0, 1, 0)});
  const VOConfig cfg{1.0, 1e-3, 2048};
  EXPECT_FALSE(in_cone({3, 0, 0}, cone, cfg));
  EXPECT_TRUE(in_cone({3, 1, 0}, cone, cfg));
}

TEST(InCone, AgreesWithForwardSimulation) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> dist(0.8, 3.0), rad(0.05, 0.5), frac(0.0, 2.0), coin(0, 1);
  const VOConfig cfg{0.6, 1e-3, 2048};
  const double agent_radius = 0.05;
  int agree = 0;
  const int samples = 1000;
  for (int i = 0; i < samples; ++i) {
    const Vec3 axis = oracle::random_unit(rng);
    const double d = dist(rng);
    const SphereObstacle ob{d * axis, std::min(rad(rng), d - agent_radius - 0.05), Vec3::Zero()};
    const auto cone = collision_cone(Point3::Zero(), agent_radius, ob);
    const Vec3 dir = coin(rng) < 0.5 ? oracle::random_unit(rng) : near_axis(rng, axis, 2.0 * cone.half_angle);
    const Vec3 v = dir * (frac(rng) * d / cfg.time_horizon);
    const bool sim = oracle::simulated_collision(Point3::Zero(), agent_radius, v, ob.center, ob.radius, ob.velocity,
                                                 cfg.time_horizon);
    const bool got = in_cone(v, cone, cfg);
    if (got) {
      ASSERT_TRUE(sim) << "cone membership must imply a collision";
    }
    if (got == sim) {
      ++agree;
      continue;
    }
    // Disagreements must sit on the cone surface or on the truncation cap.
    const double off = angle(v, axis);
    const double step = v.norm() * cfg.time_horizon / 10'000;
    const double cap = detail::first_contact_distance(d, cone.combined_radius, std::min(off, cone.half_angle));
    const bool on_surface = std::abs(off - cone.half_angle) <= cfg.boundary_epsilon;
    const bool on_cap = std::abs(cap - v.norm() * cfg.time_horizon) <= step;
    EXPECT_TRUE(on_surface || on_cap) << "sample " << i;
  }
  EXPECT_GE(agree, samples * 99 / 100);
}

TEST(AdmissibleVelocity, EmptyConeSetReturnsPreference) {
  const Vec3 v(0.3, -0.2, 0.1);
  EXPECT_EQ(admissible_velocity(v, {}, {}), v);
}

TEST(AdmissibleVelocity, AdmissiblePreferenceIsKept) {
  const auto cone = collision_cone({0, 0, 0}, 0.1, {{2, 0, 0}, 0.3, Vec3::Zero()});
  const Vec3 v(0, 1, 0);
  EXPECT_EQ(admissible_velocity(v, std::vector<CollisionCone>{cone}, {}), v);
}

TEST(AdmissibleVelocity, DeadAheadLandsOnWidenedBoundary) {
  const auto cone = collision_cone({0, 0, 0}, 0.1, {{2, 0, 0}, 0.3, Vec3::Zero()});
  const VOConfig cfg{0.6, 1e-3, 2048};
  const Vec3 v_pref(10, 0, 0);
  const Vec3 v = admissible_velocity(v_pref, std::vector<CollisionCone>{cone}, cfg);
  EXPECT_NEAR(v.norm(), v_pref.norm(), 1e-12);
  EXPECT_FALSE(in_cone(v, cone, cfg));

  // Exhaustive finer lattice of directions outside the widened cone.
  const int n = 200'000;
  const double golden = oracle::kPi * (3.0 - std::sqrt(5.0));
  double best = oracle::kPi;
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(1.0 - z * z);
    const double a = std::acos(std::clamp(r * std::cos(golden * i), -1.0, 1.0));
    if (a >= cone.half_angle + cfg.boundary_epsilon) best = std::min(best, a);
  }
  const double resolution = std::sqrt(4.0 * oracle::kPi / n);
  EXPECT_NEAR(angle(v, v_pref), best, resolution);
  EXPECT_NEAR(angle(v, v_pref), cone.half_angle + cfg.boundary_epsilon, 1e-6);
}

TEST(AdmissibleVelocity, EnclosedAgentHasNoEscape) {
  std::vector<CollisionCone> cones;
  for (const Vec3& axis : std::vector<Vec3>{Vec3::UnitX(), -Vec3::UnitX(), Vec3::UnitY(), -Vec3::UnitY(),
                                           Vec3::UnitZ(), -Vec3::UnitZ()})
    cones.push_back(collision_cone({0, 0, 0}, 0.05, {axis, 0.9, Vec3::Zero()}));
  const VOConfig cfg{0.6, 1e-3, 2048};
  for (const Vec3& d : fibonacci_directions(cfg.direction_samples)) {
    const bool blocked =
        std::any_of(cones.begin(), cones.end(), [&](const CollisionCone& c) { return in_cone(10.0 * d, c, cfg); });
    ASSERT_TRUE(blocked);
  }
  EXPECT_THROW(admissible_velocity({10, 0, 0}, cones, cfg), NoAdmissibleVelocity);
}

TEST(AdmissibleVelocity, RejectsZeroPreference) {
  EXPECT_THROW(admissible_velocity(Vec3::Zero(), {}, {}), Error);
}

TEST(AdmissibleVelocity, PropertiesOverRandomScenes) {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> dist(0.5, 2.0), rad(0.05, 0.3), speed(0.05, 4.0);
  std::uniform_int_distribution<int> count(1, 5);
  const VOConfig cfg{0.6, 1e-3, 2048};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<CollisionCone> cones;
    const int k = count(rng);
    for (int i = 0; i < k; ++i) cones.push_back(collision_cone({0, 0, 0}, 0.05, {dist(rng) * oracle::random_unit(rng), rad(rng), Vec3::Zero()}));
    const Vec3 v_pref = speed(rng) * (trial % 2 ? cones[0].axis : oracle::random_unit(rng));
    Vec3 v;
    try {
      v = admissible_velocity(v_pref, cones, cfg);
    } catch (const NoAdmissibleVelocity&) {
      continue;
    }
    ASSERT_NEAR(v.norm(), v_pref.norm(), 1e-12 * v_pref.norm());
    for (const auto& c : cones) ASSERT_FALSE(in_cone(v, c, cfg));
    ASSERT_EQ(v, admissible_velocity(v_pref, cones, cfg));
  }
}

TEST(FibonacciDirections, UnitAndDeterministic) {
  const auto a = fibonacci_directions(2048);
  ASSERT_EQ(a.size(), 2048u);
  for (const auto& d : a) ASSERT_NEAR(d.norm(), 1.0, 1e-12);
  EXPECT_EQ(a, fibonacci_directions(2048));
}
