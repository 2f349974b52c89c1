#include "jsdf/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace jsdf {

Transform axis_angle(const Eigen::Vector3d& axis, double angle) {
  Transform out;
  out.rotation = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
  return out;
}

Transform translation(const Eigen::Vector3d& t) {
  Transform out;
  out.translation = t;
  return out;
}

Transform from_rpy(const Eigen::Vector3d& rpy, const Eigen::Vector3d& xyz) {
  Transform out;
  out.rotation = (Eigen::AngleAxisd(rpy.z(), Eigen::Vector3d::UnitZ()) *
                  Eigen::AngleAxisd(rpy.y(), Eigen::Vector3d::UnitY()) *
                  Eigen::AngleAxisd(rpy.x(), Eigen::Vector3d::UnitX()))
                     .toRotationMatrix();
  out.translation = xyz;
  return out;
}

Transform from_quat(double w, double x, double y, double z,
                    const Eigen::Vector3d& xyz) {
  Eigen::Quaterniond q(w, x, y, z);
  if (q.norm() < 1e-12) {
    throw std::invalid_argument("quaternion has near-zero norm");
  }
  q.normalize();
  Transform out;
  out.rotation = q.toRotationMatrix();
  out.translation = xyz;
  return out;
}

void validate_transform(const Transform& t, const char* what) {
  if (!t.rotation.allFinite() || !t.translation.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite transform");
  }
  const Eigen::Matrix3d err =
      t.rotation.transpose() * t.rotation - Eigen::Matrix3d::Identity();
  if (err.cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument(std::string(what) +
                                ": rotation is not orthonormal");
  }
  if (std::abs(t.rotation.determinant() - 1.0) > 1e-9) {
    throw std::invalid_argument(std::string(what) +
                                ": rotation determinant is not +1");
  }
}

}  // namespace jsdf
