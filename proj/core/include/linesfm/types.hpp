#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace linesfm {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Matrix<double, 4, 1>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Camera velocity expressed in the camera frame.
struct CameraTwist {
  Vec3 nu = Vec3::Zero();     ///< linear velocity [m/s]
  Vec3 omega = Vec3::Zero();  ///< angular velocity [rad/s]

  [[nodiscard]] bool is_finite() const { return nu.allFinite() && omega.allFinite(); }
};

/// [v]_x such that skew(v) * w == v.cross(w).
inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

}  // namespace linesfm
