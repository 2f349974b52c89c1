#include "jsdf/collision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "jsdf/kinematics.hpp"

namespace jsdf {

double point_segment_distance(const Eigen::Vector3d& p,
                              const Eigen::Vector3d& a,
                              const Eigen::Vector3d& b) {
  const Eigen::Vector3d ab = b - a;
  const double denom = ab.squaredNorm();
  double t = denom > 0.0 ? ab.dot(p - a) / denom : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Closest points between segments, Ericson, Real-Time Collision Detection 5.1.9.
double segment_segment_distance(const Eigen::Vector3d& p0,
                                const Eigen::Vector3d& p1,
                                const Eigen::Vector3d& q0,
                                const Eigen::Vector3d& q1) {
  const Eigen::Vector3d d1 = p1 - p0;
  const Eigen::Vector3d d2 = q1 - q0;
  const Eigen::Vector3d r = p0 - q0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0, t = 0.0;
  constexpr double kEps = 1e-14;

  if (a <= kEps && e <= kEps) {
    return r.norm();
  }
  if (a <= kEps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= kEps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      if (denom > kEps) {
        s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
      }
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p0 + s * d1) - (q0 + t * d2)).norm();
}

Capsule place_capsule(const Transform& t, const Capsule& c) {
  return Capsule{t.apply(c.p0), t.apply(c.p1), c.radius};
}

namespace {

double sep_impl(const Sphere& a, const Sphere& b) {
  return (a.center - b.center).norm() - a.radius - b.radius;
}

double sep_impl(const Sphere& a, const Capsule& b) {
  return point_segment_distance(a.center, b.p0, b.p1) - a.radius - b.radius;
}

double sep_impl(const Capsule& a, const Capsule& b) {
  return segment_segment_distance(a.p0, a.p1, b.p0, b.p1) - a.radius -
         b.radius;
}

double sep_impl(const Sphere& a, const HalfSpace& b) {
  return b.normal.dot(a.center) - b.offset - a.radius;
}

double sep_impl(const Capsule& a, const HalfSpace& b) {
  const double d = std::min(b.normal.dot(a.p0), b.normal.dot(a.p1));
  return d - b.offset - a.radius;
}

}  // namespace

double primitive_separation(const Obstacle& a, const Obstacle& b) {
  return std::visit(
      [](const auto& x, const auto& y) -> double {
        using X = std::decay_t<decltype(x)>;
        using Y = std::decay_t<decltype(y)>;
        if constexpr (std::is_same_v<X, HalfSpace> &&
                      std::is_same_v<Y, HalfSpace>) {
          throw std::invalid_argument(
              "unsupported primitive pair: half-space vs half-space");
        } else if constexpr (std::is_same_v<X, HalfSpace>) {
          return sep_impl(y, x);
        } else if constexpr (std::is_same_v<Y, HalfSpace>) {
          return sep_impl(x, y);
        } else if constexpr (std::is_same_v<X, Sphere>) {
          return sep_impl(x, y);
        } else if constexpr (std::is_same_v<Y, Sphere>) {
          return sep_impl(y, x);
        } else {
          return sep_impl(x, y);
        }
      },
      a, b);
}

Scene make_scene(RobotModel robot, std::vector<Obstacle> obstacles,
                 const std::vector<std::pair<int, int>>& exclude,
                 double clearance, std::string id) {
  Scene scene;
  scene.robot = std::move(robot);
  scene.obstacles = std::move(obstacles);
  scene.clearance = clearance;
  scene.id = std::move(id);
  const int links = scene.robot.link_count();
  auto excluded = [&](int i, int j) {
    for (const auto& [a, b] : exclude) {
      if ((a == i && b == j) || (a == j && b == i)) return true;
    }
    return false;
  };
  for (int i = 0; i < links; ++i) {
    for (int j = i + 1; j < links; ++j) {
      const bool adjacent = (j >= 1 && scene.robot.parent_link(j) == i) ||
                            (i >= 1 && scene.robot.parent_link(i) == j);
      if (!adjacent && !excluded(i, j)) {
        scene.self_pairs.emplace_back(i, j);
      }
    }
  }
  validate_scene(scene);
  return scene;
}

void validate_scene(const Scene& scene) {
  validate_model(scene.robot);
  if (scene.clearance < 0.0) {
    throw std::invalid_argument("clearance must be >= 0");
  }
  for (const Obstacle& o : scene.obstacles) {
    std::visit(
        [](const auto& prim) {
          using T = std::decay_t<decltype(prim)>;
          if constexpr (std::is_same_v<T, HalfSpace>) {
            if (std::abs(prim.normal.norm() - 1.0) > 1e-9) {
              throw std::invalid_argument(
                  "half-space normal must be unit length");
            }
          } else {
            if (!(prim.radius > 0.0)) {
              throw std::invalid_argument("obstacle radius must be positive");
            }
          }
        },
        o);
  }
  const int links = scene.robot.link_count();
  for (const auto& [i, j] : scene.self_pairs) {
    if (i < 0 || j < 0 || i >= links || j >= links || i == j) {
      throw std::invalid_argument("self-collision pair index out of range");
    }
    const bool adjacent = (j >= 1 && scene.robot.parent_link(j) == i) ||
                          (i >= 1 && scene.robot.parent_link(i) == j);
    if (adjacent) {
      throw std::invalid_argument(
          "self-collision pair (" + std::to_string(i) + ", " +
          std::to_string(j) + ") is an adjacent parent/child pair");
    }
  }
}

CollisionReport detect_collisions(const Scene& scene, const Pose& pose) {
  const std::vector<Transform> world = forward_kinematics(scene.robot, pose);
  const int links = scene.robot.link_count();
  std::vector<std::vector<Capsule>> placed(links);
  for (int l = 0; l < links; ++l) {
    placed[l].reserve(scene.robot.link_capsules[l].size());
    for (const Capsule& c : scene.robot.link_capsules[l]) {
      placed[l].push_back(place_capsule(world[l], c));
    }
  }

  CollisionReport report;
  report.min_separation = std::numeric_limits<double>::infinity();
  auto consider = [&](double sep) {
    report.min_separation = std::min(report.min_separation, sep);
    if (sep < scene.clearance) ++report.pair_count;
  };

  for (int l = 0; l < links; ++l) {
    for (const Capsule& c : placed[l]) {
      for (const Obstacle& o : scene.obstacles) {
        consider(primitive_separation(Obstacle{c}, o));
      }
    }
  }
  for (const auto& [i, j] : scene.self_pairs) {
    for (const Capsule& a : placed[i]) {
      for (const Capsule& b : placed[j]) {
        consider(sep_impl(a, b));
      }
    }
  }
  report.collided = report.pair_count >= 1;
  return report;
}

CollisionStats collision_stats(const Scene& scene,
                               const std::vector<Pose>& poses) {
  if (poses.empty()) {
    throw std::invalid_argument("collision_stats needs a nonempty pose list");
  }
  CollisionStats stats;
  for (const Pose& p : poses) {
    const CollisionReport r = detect_collisions(scene, p);
    stats.mean_pair_count += r.pair_count;
    stats.collision_rate += r.collided ? 1.0 : 0.0;
  }
  stats.mean_pair_count /= static_cast<double>(poses.size());
  stats.collision_rate /= static_cast<double>(poses.size());
  return stats;
}

}  // namespace jsdf
