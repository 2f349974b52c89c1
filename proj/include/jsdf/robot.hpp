#pragma once

#include <vector>

#include <Eigen/Dense>

#include "jsdf/geometry.hpp"

namespace jsdf {

/// Joint angles in radians, one entry per joint.
using Pose = Eigen::VectorXd;

/// Capsule: segment p0-p1 swept by a sphere of `radius`. Link-local frame
/// when attached to a link, world frame when used as an obstacle.
struct Capsule {
  Eigen::Vector3d p0;
  Eigen::Vector3d p1;
  double radius = 0.0;
};

/// One revolute joint. `parent` is the index of the parent joint, -1 for the
/// joint mounted on the base link. `origin` is the fixed transform from the
/// parent link frame to the joint frame; the joint rotates about `axis`
/// (unit vector in the joint frame) within [lo, hi] radians.
struct Joint {
  int parent = -1;
  Transform origin;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double lo = 0.0;
  double hi = 0.0;
};

/// Kinematic chain of K revolute joints. Link 0 is the fixed base; joint k
/// (0-based) articulates link k+1. link_capsules has K+1 entries.
struct RobotModel {
  std::vector<Joint> joints;
  std::vector<std::vector<Capsule>> link_capsules;

  int joint_count() const { return static_cast<int>(joints.size()); }
  int link_count() const { return joint_count() + 1; }

  /// Parent link index of link `link` (link >= 1).
  int parent_link(int link) const {
    const int p = joints[link - 1].parent;
    return p < 0 ? 0 : p + 1;
  }

  Eigen::VectorXd limits_lo() const;
  Eigen::VectorXd limits_hi() const;
};

/// Enforces the model invariants: single base-mounted root, topological
/// parent order, unit axes, lo < hi with span <= 2*pi, positive capsule
/// radii, valid origin transforms. Throws std::invalid_argument.
void validate_model(const RobotModel& model);

}  // namespace jsdf
