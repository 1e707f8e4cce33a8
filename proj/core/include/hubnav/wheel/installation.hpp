#pragma once

#include <Eigen/Core>

namespace hubnav::wheel {

/// Installation parameters of the wheel-mounted IMU and the GNSS antenna.
///
/// `leverarm` is the (y, z) offset from the IMU center to the wheel center in
/// the body frame; the x component is fixed at zero. `mounting` holds the
/// (pitch, heading) misalignment between body and wheel frame. The measured
/// wheel radius stays fixed; `radius_scale` is the accumulated estimate of
/// its relative error, so the working radius is measured/(1 + scale).
struct InstallationParams {
  Eigen::Vector2d leverarm = Eigen::Vector2d::Zero();   // (l_y, l_z), m
  Eigen::Vector2d mounting = Eigen::Vector2d::Zero();   // (theta_m, psi_m), rad
  double measured_radius = 0.3;                         // m, > 0
  double radius_scale = 0.0;                            // unitless, |s| < 0.1
  Eigen::Vector3d antenna_lever_v = Eigen::Vector3d::Zero();  // vehicle frame, m

  Eigen::Vector3d leverarm3() const {
    return {0.0, leverarm.x(), leverarm.y()};
  }
  double effective_radius() const {
    return measured_radius / (1.0 + radius_scale);
  }
};

}  // namespace hubnav::wheel
