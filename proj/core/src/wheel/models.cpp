#include "hubnav/wheel/models.hpp"

#include <cmath>

#include "hubnav/geo/geodetic.hpp"
#include "hubnav/geo/rotation.hpp"

namespace hubnav::wheel {

using eskf::idx::kAtt;
using eskf::idx::kDim;
using eskf::idx::kGyroBias;
using eskf::idx::kGyroScale;
using eskf::idx::kLeverArm;
using eskf::idx::kMounting;
using eskf::idx::kPos;
using eskf::idx::kRadiusScale;
using eskf::idx::kVel;
using geo::skew;

Eigen::Matrix3d body_to_wheel_rotation(const Eigen::Vector2d& mounting) {
  const double ct = std::cos(mounting.x()), st = std::sin(mounting.x());
  const double cp = std::cos(mounting.y()), sp = std::sin(mounting.y());
  Eigen::Matrix3d r;
  r << ct * cp, -sp, st * cp,
       ct * sp,  cp, st * sp,
       -st,     0.0, ct;
  return r;
}

Eigen::RowVector2d mounting_jacobian(const Eigen::Vector3d& omega, double radius,
                                     const Eigen::Vector2d& mounting) {
  const double ct = std::cos(mounting.x()), st = std::sin(mounting.x());
  const double cp = std::cos(mounting.y()), sp = std::sin(mounting.y());
  Eigen::RowVector2d a;
  a(0) = -omega.x() * radius * st * cp + omega.z() * radius * ct * cp;
  a(1) = -omega.x() * radius * ct * sp - omega.y() * radius * cp -
         omega.z() * radius * st * sp;
  return a;
}

double wheel_forward_velocity(const Eigen::Vector3d& omega,
                              const InstallationParams& install) {
  const Eigen::Matrix3d r_b_w = body_to_wheel_rotation(install.mounting);
  return r_b_w.row(0).dot(omega) * install.effective_radius();
}

VehicleRotation derive_vehicle_rotation(const Eigen::Matrix3d& att_b_n,
                                        const Eigen::Vector2d& mounting) {
  VehicleRotation out;
  const Eigen::Matrix3d r_b_w = body_to_wheel_rotation(mounting);
  const Eigen::Vector3d wheel_axis_n = att_b_n * r_b_w.row(0).transpose();
  const double horizontal =
      std::hypot(wheel_axis_n.x(), wheel_axis_n.y());
  if (horizontal < 1e-6) {
    out.degenerate = true;
    return out;
  }
  const double psi_w = std::atan2(wheel_axis_n.y(), wheel_axis_n.x());
  out.heading = geo::wrap_pi(psi_w - M_PI / 2.0);
  out.r_n_v = geo::rotation_z(out.heading).transpose();
  return out;
}

BlockResult build_velocity_block(const ins::NavState& nav,
                                 const Eigen::Vector3d& omega,
                                 const InstallationParams& install,
                                 const VelocityNoise& noise) {
  BlockResult out;
  const VehicleRotation vr = derive_vehicle_rotation(nav.att, install.mounting);
  if (vr.degenerate) {
    out.valid = false;
    return out;
  }

  const Eigen::Matrix3d r_n_v = vr.r_n_v;
  const Eigen::Matrix3d r_b_v = r_n_v * nav.att;
  const Eigen::Vector3d lever3 = install.leverarm3();
  const double radius = install.effective_radius();
  const Eigen::Matrix3d r_b_w = body_to_wheel_rotation(install.mounting);

  const double forward = r_b_w.row(0).dot(omega) * radius;
  const Eigen::Vector3d predicted =
      r_n_v * nav.vel + r_b_v * omega.cross(lever3);
  const Eigen::Vector3d observed(forward, 0.0, 0.0);

  MeasurementBlock& blk = out.block;
  blk.kind = MeasurementKind::kVelocity;
  blk.z = predicted - observed;
  blk.r = Eigen::Vector3d(noise.sigma_forward * noise.sigma_forward,
                          noise.sigma_lateral * noise.sigma_lateral,
                          noise.sigma_vertical * noise.sigma_vertical)
              .asDiagonal();

  blk.h = Eigen::MatrixXd::Zero(3, kDim);
  blk.h.block<3, 3>(0, kVel) = r_n_v;
  // Horizontal-plane vehicle attitude: only the heading component of the
  // attitude error couples into the derived vehicle frame.
  blk.h.block<3, 1>(0, kAtt + 2) =
      -r_n_v * nav.vel.cross(Eigen::Vector3d::UnitZ());
  blk.h.block<3, 3>(0, kGyroBias) = -r_b_v * skew(lever3);
  blk.h.block<3, 3>(0, kGyroScale) =
      -r_b_v * skew(lever3) * omega.asDiagonal();
  blk.h.block<3, 2>(0, kLeverArm) =
      (r_b_v * skew(omega)).block<3, 2>(0, 1);
  Eigen::Matrix<double, 3, 2> d =
      skew(r_b_v * omega.cross(lever3)).block<3, 2>(0, 1);
  // The mounting error state is truth-minus-estimate (the convention the
  // wheel-rate constraint and the feedback fix), so the forward-speed
  // sensitivity enters with a positive sign.
  d.row(0) += mounting_jacobian(omega, radius, install.mounting);
  blk.h.block<3, 2>(0, kMounting) = d;
  blk.h(0, kRadiusScale) = -forward;
  return out;
}

Eigen::Vector3d gnss_leverarm_body(const InstallationParams& install,
                                   const Eigen::Matrix3d& r_v_b) {
  return install.leverarm3() + r_v_b * install.antenna_lever_v;
}

BlockResult build_gnss_block(const geo::EarthModel& earth,
                             const ins::NavState& nav,
                             const InstallationParams& install,
                             const GnssFix& fix) {
  BlockResult out;
  const VehicleRotation vr = derive_vehicle_rotation(nav.att, install.mounting);
  if (vr.degenerate) {
    out.valid = false;
    return out;
  }
  const Eigen::Matrix3d r_v_b = (vr.r_n_v * nav.att).transpose();
  const Eigen::Vector3d lever_b = gnss_leverarm_body(install, r_v_b);

  const Eigen::Matrix3d r_n_e = geo::n_to_e_rotation(nav.pos);
  const Eigen::Vector3d predicted_ecef =
      geo::geodetic_to_ecef(earth, nav.pos) + r_n_e * (nav.att * lever_b);
  const Eigen::Vector3d observed_ecef = geo::geodetic_to_ecef(earth, fix.pos);

  MeasurementBlock& blk = out.block;
  blk.kind = MeasurementKind::kGnss;
  blk.z = r_n_e.transpose() * (predicted_ecef - observed_ecef);
  blk.r = fix.std.cwiseProduct(fix.std).asDiagonal();

  blk.h = Eigen::MatrixXd::Zero(3, kDim);
  blk.h.block<3, 3>(0, kPos).setIdentity();
  blk.h.block<3, 3>(0, kAtt) = skew(nav.att * lever_b);
  blk.h.block<3, 2>(0, kLeverArm) = nav.att.block<3, 2>(0, 1);
  blk.h.block<3, 2>(0, kMounting) =
      -(nav.att * r_v_b * skew(install.antenna_lever_v)).block<3, 2>(0, 1);
  return out;
}

MeasurementBlock build_wheel_rate_block(const Eigen::Vector3d& omega,
                                        const InstallationParams& install,
                                        double sigma_omega) {
  const Eigen::Matrix3d r_b_w = body_to_wheel_rotation(install.mounting);
  const Eigen::Vector3d omega_w = r_b_w * omega;

  MeasurementBlock blk;
  blk.kind = MeasurementKind::kWheelRate;
  // Only the y/z wheel-frame rates carry information: their expectation is
  // zero while the vehicle rolls straight.
  blk.z = omega_w.tail<2>();
  blk.r = sigma_omega * sigma_omega * Eigen::Matrix2d::Identity();

  Eigen::MatrixXd h_full = Eigen::MatrixXd::Zero(3, kDim);
  h_full.block<3, 3>(0, kGyroBias) = r_b_w;
  h_full.block<3, 3>(0, kGyroScale) = r_b_w * omega.asDiagonal();
  h_full.block<3, 2>(0, kMounting) = skew(omega_w).block<3, 2>(0, 1);
  blk.h = h_full.bottomRows(2);
  return blk;
}

}  // namespace hubnav::wheel
