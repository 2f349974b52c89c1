#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "jsdf/robot.hpp"

namespace jsdf {

struct Sphere {
  Eigen::Vector3d center;
  double radius = 0.0;
};

/// Solid half-space: points p with normal . p <= offset are inside material.
struct HalfSpace {
  Eigen::Vector3d normal;
  double offset = 0.0;
};

using Obstacle = std::variant<Sphere, Capsule, HalfSpace>;

/// Ground-truth world: robot + static obstacles + self-collision policy.
/// self_pairs lists the link-index pairs tested against each other; by
/// default all pairs except a link with itself, its parent, and its children.
struct Scene {
  RobotModel robot;
  std::vector<Obstacle> obstacles;
  std::vector<std::pair<int, int>> self_pairs;
  double clearance = 0.0;
  std::string id;
};

/// Fills self_pairs with the default policy minus `exclude` and validates
/// everything.
Scene make_scene(RobotModel robot, std::vector<Obstacle> obstacles,
                 const std::vector<std::pair<int, int>>& exclude = {},
                 double clearance = 0.0, std::string id = "");

void validate_scene(const Scene& scene);

struct CollisionReport {
  bool collided = false;
  int pair_count = 0;
  double min_separation = 0.0;  // +inf when no pair was tested
};

/// Separation between two world-frame primitives: core distance minus summed
/// radii; negative means penetration. Throws on unsupported pair kinds
/// (half-space vs half-space).
double primitive_separation(const Obstacle& a, const Obstacle& b);

// Exact distance kernels used by primitive_separation.
double point_segment_distance(const Eigen::Vector3d& p,
                              const Eigen::Vector3d& a,
                              const Eigen::Vector3d& b);
double segment_segment_distance(const Eigen::Vector3d& p0,
                                const Eigen::Vector3d& p1,
                                const Eigen::Vector3d& q0,
                                const Eigen::Vector3d& q1);

/// Capsule in link-local coordinates placed into the world by `t`.
Capsule place_capsule(const Transform& t, const Capsule& c);

/// Tests every (robot capsule, obstacle) pair plus all self_pairs capsule
/// pairs at the given pose. A pair is in contact when separation < clearance.
CollisionReport detect_collisions(const Scene& scene, const Pose& pose);

struct CollisionStats {
  double mean_pair_count = 0.0;
  double collision_rate = 0.0;
};

CollisionStats collision_stats(const Scene& scene,
                               const std::vector<Pose>& poses);

}  // namespace jsdf
