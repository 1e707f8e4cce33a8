#pragma once

#include <Eigen/Core>

#include "hubnav/eskf/state_index.hpp"
#include "hubnav/geo/earth.hpp"
#include "hubnav/ins/mechanization.hpp"
#include "hubnav/wheel/installation.hpp"

namespace hubnav::wheel {

/// GNSS receiver position fix with per-axis standard deviations.
struct GnssFix {
  double t = 0.0;
  geo::GeodeticPosition pos;
  Eigen::Vector3d std = Eigen::Vector3d::Constant(1.0);  // NED 1-sigma, m
};

enum class MeasurementKind { kVelocity, kGnss, kWheelRate };

/// One linearized observation: z = H x + noise, z = predicted - observed.
struct MeasurementBlock {
  Eigen::MatrixXd h;  // k x 26
  Eigen::VectorXd z;  // k
  Eigen::MatrixXd r;  // k x k
  MeasurementKind kind = MeasurementKind::kVelocity;
};

/// Body-to-wheel rotation built from the (pitch, heading) mounting angles:
/// Rz(psi_m) * Ry(theta_m), roll omitted.
Eigen::Matrix3d body_to_wheel_rotation(const Eigen::Vector2d& mounting);

/// 1x2 sensitivity of the forward wheel velocity to the (pitch, heading)
/// mounting angles: the exact gradient of row1(R_b^w) * omega * r.
Eigen::RowVector2d mounting_jacobian(const Eigen::Vector3d& omega, double radius,
                                     const Eigen::Vector2d& mounting);

/// Forward wheel velocity from the spin-axis angular rate, m/s. Uses the
/// current mounting estimate and the scale-corrected wheel radius.
double wheel_forward_velocity(const Eigen::Vector3d& omega,
                              const InstallationParams& install);

struct VehicleRotation {
  Eigen::Matrix3d r_n_v = Eigen::Matrix3d::Identity();  // n -> vehicle
  double heading = 0.0;   // vehicle heading psi_v, rad
  bool degenerate = false;  // wheel axis near vertical, heading undefined
};

/// Vehicle attitude reconstructed from the wheel-axis direction: the wheel
/// heading is the horizontal direction of R_b^n * row1(R_b^w)', the vehicle
/// heading sits a quarter turn behind it, and roll/pitch are zero by the
/// horizontal-plane assumption.
VehicleRotation derive_vehicle_rotation(const Eigen::Matrix3d& att_b_n,
                                        const Eigen::Vector2d& mounting);

struct VelocityNoise {
  double sigma_forward = 0.05;   // m/s
  double sigma_lateral = 0.05;   // m/s
  double sigma_vertical = 0.05;  // m/s
};

struct BlockResult {
  MeasurementBlock block;
  bool valid = true;  // false when the vehicle-heading derivation degenerates
};

/// Wheel-velocity / non-holonomic-constraint observation (k = 3).
/// `omega` is the compensated body angular rate used for both the observed
/// wheel speed and the leverarm terms.
BlockResult build_velocity_block(const ins::NavState& nav,
                                 const Eigen::Vector3d& omega,
                                 const InstallationParams& install,
                                 const VelocityNoise& noise);

/// GNSS antenna offset in the body frame, recomputed per epoch because the
/// body spins: l_w + R_v^b * l_gnss^v.
Eigen::Vector3d gnss_leverarm_body(const InstallationParams& install,
                                   const Eigen::Matrix3d& r_v_b);

/// GNSS position observation with the rotating leverarm (k = 3).
BlockResult build_gnss_block(const geo::EarthModel& earth,
                             const ins::NavState& nav,
                             const InstallationParams& install,
                             const GnssFix& fix);

/// Wheel angular velocity constraint (k = 2): during straight motion the
/// wheel-frame y/z angular rates are zero. Updates only the gyro bias, gyro
/// scale, and mounting-angle states.
MeasurementBlock build_wheel_rate_block(const Eigen::Vector3d& omega,
                                        const InstallationParams& install,
                                        double sigma_omega);

}  // namespace hubnav::wheel
