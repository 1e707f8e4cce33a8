#pragma once

#include <Eigen/Core>

namespace hubnav::ins {

/// One IMU sample: body-frame angular rate and specific force.
struct ImuSample {
  double t = 0.0;                                   // s
  Eigen::Vector3d gyro = Eigen::Vector3d::Zero();   // rad/s
  Eigen::Vector3d accel = Eigen::Vector3d::Zero();  // m/s^2
};

/// Current estimates of the inertial sensor errors.
/// Measurement model: y = (I + diag(scale)) * x_true + bias + noise.
struct ImuErrors {
  Eigen::Vector3d gyro_bias = Eigen::Vector3d::Zero();    // rad/s
  Eigen::Vector3d accel_bias = Eigen::Vector3d::Zero();   // m/s^2
  Eigen::Vector3d gyro_scale = Eigen::Vector3d::Zero();   // unitless
  Eigen::Vector3d accel_scale = Eigen::Vector3d::Zero();  // unitless
};

/// Invert the sensor-error model: x = (I + diag(scale))^-1 (y - bias).
/// Throws std::invalid_argument if any scale component <= -1.
ImuSample compensate(const ImuSample& raw, const ImuErrors& errors);

}  // namespace hubnav::ins
