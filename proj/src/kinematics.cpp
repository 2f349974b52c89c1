#include "jsdf/kinematics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace jsdf {

Eigen::VectorXd RobotModel::limits_lo() const {
  Eigen::VectorXd lo(joint_count());
  for (int k = 0; k < joint_count(); ++k) lo[k] = joints[k].lo;
  return lo;
}

Eigen::VectorXd RobotModel::limits_hi() const {
  Eigen::VectorXd hi(joint_count());
  for (int k = 0; k < joint_count(); ++k) hi[k] = joints[k].hi;
  return hi;
}

void validate_model(const RobotModel& model) {
  const int k_count = model.joint_count();
  if (k_count < 1) {
    throw std::invalid_argument("robot must have at least one joint");
  }
  if (static_cast<int>(model.link_capsules.size()) != k_count + 1) {
    throw std::invalid_argument("robot must have exactly joint_count+1 links");
  }
  for (int k = 0; k < k_count; ++k) {
    const Joint& j = model.joints[k];
    if (k == 0) {
      if (j.parent != -1) {
        throw std::invalid_argument("joint 1 must be mounted on the base");
      }
    } else if (j.parent < -1 || j.parent >= k) {
      throw std::invalid_argument("joint " + std::to_string(k + 1) +
                                  ": parent must precede it in the chain");
    } else if (j.parent == -1) {
      throw std::invalid_argument("joint " + std::to_string(k + 1) +
                                  ": only joint 1 may attach to the base");
    }
    if (std::abs(j.axis.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("joint " + std::to_string(k + 1) +
                                  ": rotation axis must be unit length");
    }
    if (!(j.lo < j.hi)) {
      throw std::invalid_argument("joint " + std::to_string(k + 1) +
                                  ": limits must satisfy lo < hi");
    }
    if (j.hi - j.lo > 2.0 * M_PI + 1e-12) {
      throw std::invalid_argument("joint " + std::to_string(k + 1) +
                                  ": limit span exceeds 2*pi");
    }
    validate_transform(j.origin, "joint origin");
  }
  for (std::size_t link = 0; link < model.link_capsules.size(); ++link) {
    for (const Capsule& c : model.link_capsules[link]) {
      if (!(c.radius > 0.0)) {
        throw std::invalid_argument("link " + std::to_string(link) +
                                    ": capsule radius must be positive");
      }
      if (!c.p0.allFinite() || !c.p1.allFinite()) {
        throw std::invalid_argument("link " + std::to_string(link) +
                                    ": capsule endpoints must be finite");
      }
    }
  }
}

std::vector<Transform> forward_kinematics(const RobotModel& model,
                                          const Pose& pose) {
  const int k_count = model.joint_count();
  if (pose.size() != k_count) {
    throw std::invalid_argument("pose has " + std::to_string(pose.size()) +
                                " entries, robot has " +
                                std::to_string(k_count) + " joints");
  }
  if (!pose.allFinite()) {
    throw std::invalid_argument("pose contains non-finite angles");
  }
  std::vector<Transform> world(k_count + 1);
  world[0] = Transform::identity();
  for (int k = 0; k < k_count; ++k) {
    const Joint& j = model.joints[k];
    const int parent = j.parent < 0 ? 0 : j.parent + 1;
    world[k + 1] = world[parent] * j.origin * axis_angle(j.axis, pose[k]);
  }
  return world;
}

Pose validate_pose(const RobotModel& model, const Pose& pose,
                   LimitPolicy policy) {
  const int k_count = model.joint_count();
  if (pose.size() != k_count) {
    throw std::invalid_argument("pose has " + std::to_string(pose.size()) +
                                " entries, robot has " +
                                std::to_string(k_count) + " joints");
  }
  if (!pose.allFinite()) {
    throw std::invalid_argument("pose contains non-finite angles");
  }
  Pose out = pose;
  for (int k = 0; k < k_count; ++k) {
    const Joint& j = model.joints[k];
    if (pose[k] < j.lo || pose[k] > j.hi) {
      if (policy == LimitPolicy::kReject) {
        throw std::invalid_argument(
            "joint " + std::to_string(k + 1) + " angle " +
            std::to_string(pose[k]) + " outside limits [" +
            std::to_string(j.lo) + ", " + std::to_string(j.hi) + "]");
      }
      out[k] = std::min(std::max(pose[k], j.lo), j.hi);
    }
  }
  return out;
}

std::vector<Pose> interpolate_poses(const Pose& start, const Pose& end,
                                    int n) {
  if (n < 2) {
    throw std::invalid_argument("interpolation needs at least 2 poses");
  }
  if (start.size() != end.size()) {
    throw std::invalid_argument("start and end poses differ in size");
  }
  std::vector<Pose> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    out.push_back(start + t * (end - start));
  }
  return out;
}

}  // namespace jsdf
