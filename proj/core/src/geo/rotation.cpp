#include "hubnav/geo/rotation.hpp"

#include <cmath>

namespace hubnav::geo {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m <<    0.0, -v.z(),  v.y(),
        v.z(),    0.0, -v.x(),
       -v.y(),  v.x(),    0.0;
  return m;
}

Eigen::Matrix3d rotation_x(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix3d r;
  r << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return r;
}

Eigen::Matrix3d rotation_y(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix3d r;
  r << c, 0, s,
       0, 1, 0,
       -s, 0, c;
  return r;
}

Eigen::Matrix3d rotation_z(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix3d r;
  r << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return r;
}

Eigen::Matrix3d euler_to_rotation(const EulerZYX& e) {
  return rotation_z(e.yaw) * rotation_y(e.pitch) * rotation_x(e.roll);
}

EulerResult rotation_to_euler(const Eigen::Matrix3d& rot) {
  EulerResult out;
  const double sp = -rot(2, 0);
  out.euler.pitch = std::asin(std::clamp(sp, -1.0, 1.0));
  if (std::abs(std::abs(sp) - 1.0) < 1e-8) {
    // Gimbal lock: yaw and roll are not separable; put everything in yaw.
    out.gimbal_lock = true;
    out.euler.roll = 0.0;
    out.euler.yaw = std::atan2(-rot(0, 1), rot(1, 1));
  } else {
    out.euler.roll = std::atan2(rot(2, 1), rot(2, 2));
    out.euler.yaw = std::atan2(rot(1, 0), rot(0, 0));
  }
  return out;
}

Eigen::Matrix3d exp_so3(const Eigen::Vector3d& phi) {
  const double angle = phi.norm();
  const Eigen::Matrix3d s = skew(phi);
  if (angle < 1e-10) {
    return Eigen::Matrix3d::Identity() + s + 0.5 * s * s;
  }
  const double a = std::sin(angle) / angle;
  const double b = (1.0 - std::cos(angle)) / (angle * angle);
  return Eigen::Matrix3d::Identity() + a * s + b * s * s;
}

Eigen::Vector3d log_so3(const Eigen::Matrix3d& rot) {
  const double cos_angle = std::clamp((rot.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double angle = std::acos(cos_angle);
  Eigen::Vector3d v(rot(2, 1) - rot(1, 2), rot(0, 2) - rot(2, 0),
                    rot(1, 0) - rot(0, 1));
  if (angle < 1e-8) {
    return 0.5 * v;
  }
  return 0.5 * angle / std::sin(angle) * v;
}

Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& rot) {
  // One step of the symmetric (Bjorck) iteration: R <- R (3I - R'R) / 2.
  // Drift per mechanization step is tiny, so one step keeps R'R - I at
  // roundoff level.
  return 0.5 * rot * (3.0 * Eigen::Matrix3d::Identity() -
                      rot.transpose() * rot);
}

bool is_rotation(const Eigen::Matrix3d& rot, double tol) {
  const Eigen::Matrix3d err =
      rot.transpose() * rot - Eigen::Matrix3d::Identity();
  return err.cwiseAbs().maxCoeff() < tol &&
         std::abs(rot.determinant() - 1.0) < tol;
}

}  // namespace hubnav::geo
