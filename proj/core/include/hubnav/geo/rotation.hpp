#pragma once

#include <Eigen/Dense>

namespace hubnav::geo {

/// Skew-symmetric matrix of v, so that skew(v) * w == v x w.
Eigen::Matrix3d skew(const Eigen::Vector3d& v);

/// Intrinsic z-y-x Euler angles: yaw about z, then pitch about y, then roll
/// about x. euler_to_rotation gives the frame-to-parent matrix
/// Rz(yaw) * Ry(pitch) * Rx(roll).
struct EulerZYX {
  double roll = 0.0;   // rad
  double pitch = 0.0;  // rad, |pitch| <= pi/2
  double yaw = 0.0;    // rad
};

Eigen::Matrix3d rotation_x(double angle);
Eigen::Matrix3d rotation_y(double angle);
Eigen::Matrix3d rotation_z(double angle);

Eigen::Matrix3d euler_to_rotation(const EulerZYX& e);

struct EulerResult {
  EulerZYX euler;
  bool gimbal_lock = false;  // |pitch| within 1e-8 of pi/2; roll forced to 0
};

EulerResult rotation_to_euler(const Eigen::Matrix3d& rot);

/// SO(3) exponential: rotation matrix for rotation vector phi.
Eigen::Matrix3d exp_so3(const Eigen::Vector3d& phi);

/// SO(3) logarithm: rotation vector of R (angle < pi assumed well away).
Eigen::Vector3d log_so3(const Eigen::Matrix3d& rot);

/// Nearest orthonormal matrix (symmetric correction, one Newton step).
Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& rot);

/// True if R'R = I and det R = +1 within tol.
bool is_rotation(const Eigen::Matrix3d& rot, double tol = 1e-9);

}  // namespace hubnav::geo
