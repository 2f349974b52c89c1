#pragma once

#include <vector>

#include "jsdf/robot.hpp"

namespace jsdf {

enum class LimitPolicy { kReject, kClamp };

/// World-frame placement of every link, index 0 = base (identity).
/// transform[k+1] = transform[parent_link] * origin_k * rot(axis_k, theta_k).
std::vector<Transform> forward_kinematics(const RobotModel& model,
                                          const Pose& pose);

/// Reject mode throws naming the first offending joint (1-based); clamp mode
/// projects each coordinate onto [lo, hi].
Pose validate_pose(const RobotModel& model, const Pose& pose,
                   LimitPolicy policy);

/// n >= 2 poses, per-coordinate linear in angle space, endpoints exact.
std::vector<Pose> interpolate_poses(const Pose& start, const Pose& end, int n);

}  // namespace jsdf
