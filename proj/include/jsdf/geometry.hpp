#pragma once

#include <Eigen/Dense>

namespace jsdf {

/// Rigid transform stored as rotation matrix + translation (meters).
struct Transform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }

  Transform operator*(const Transform& rhs) const {
    Transform out;
    out.rotation = rotation * rhs.rotation;
    out.translation = rotation * rhs.translation + translation;
    return out;
  }

  static Transform identity() { return Transform{}; }
};

/// Rotation about a unit axis by `angle` radians (Rodrigues).
Transform axis_angle(const Eigen::Vector3d& axis, double angle);

/// Pure translation.
Transform translation(const Eigen::Vector3d& t);

/// Rotation from roll/pitch/yaw (extrinsic x-y-z), plus translation.
Transform from_rpy(const Eigen::Vector3d& rpy, const Eigen::Vector3d& xyz);

/// Rotation from quaternion (w, x, y, z; normalized on input), plus translation.
Transform from_quat(double w, double x, double y, double z,
                    const Eigen::Vector3d& xyz);

/// Throws if rotation is not orthonormal with determinant +1 (1e-9 tolerance)
/// or any entry is non-finite.
void validate_transform(const Transform& t, const char* what);

}  // namespace jsdf
