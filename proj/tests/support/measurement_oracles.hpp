#pragma once

// Shared finite-difference oracles for the measurement models: the nonlinear
// parent functions written with exactly the perturbation conventions the
// linearized observation matrices use (truth-minus-estimate state, left
// multiplicative frame perturbations, Euler increments on the observed wheel
// speed). Central differences of these parents are the reference Jacobians.

#include <cmath>
#include <cstdio>
#include <random>

#include <Eigen/Dense>

#include "hubnav/geo/rotation.hpp"
#include "hubnav/wheel/models.hpp"

namespace hubnav::test_support {

namespace idx = eskf::idx;

inline const geo::EarthModel kOracleEarth;
inline constexpr double kOracleDeg = geo::kDegToRad;

struct ModelPoint {
  ins::NavState nav;
  Eigen::Vector3d omega;
  wheel::InstallationParams install;
};

inline ModelPoint random_point(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ModelPoint p;
  p.nav.pos = {(15.0 + 30.0 * u(rng)) * kOracleDeg, 120.0 * u(rng) * kOracleDeg,
               40.0 + 20.0 * u(rng)};
  p.nav.vel = {3.0 * u(rng), 3.0 * u(rng), 0.2 * u(rng)};
  p.nav.att = geo::euler_to_rotation(
      {2.0 * u(rng), 0.5 * u(rng), M_PI * u(rng)});
  p.omega = {8.0 * u(rng), 0.4 * u(rng), 0.4 * u(rng)};
  p.install.leverarm = {0.06 * u(rng), 0.06 * u(rng)};
  p.install.mounting = {4.0 * kOracleDeg * u(rng), 4.0 * kOracleDeg * u(rng)};
  p.install.measured_radius = 0.28 + 0.08 * u(rng);
  p.install.radius_scale = 0.01 * u(rng);
  p.install.antenna_lever_v = {0.8 * u(rng), 0.6 * u(rng), -1.0 + 0.4 * u(rng)};
  return p;
}

// Nonlinear parents of the three observation models, written with exactly
// the perturbation conventions the published linearization uses: left
// multiplicative (I -/+ phi x) factors for the frame errors, additive Euler
// increments on the observed wheel speed, additive residual sensor errors.
// Their central-difference Jacobians are the oracles for the analytic H.

inline Eigen::Vector3d velocity_parent(const ModelPoint& p, const eskf::ErrorState& x) {
  const wheel::VehicleRotation vr =
      wheel::derive_vehicle_rotation(p.nav.att, p.install.mounting);
  const Eigen::Matrix3d r_n_v = vr.r_n_v;
  const Eigen::Matrix3d r_b_v = r_n_v * p.nav.att;
  const Eigen::Vector3d lever3 =
      p.install.leverarm3() +
      Eigen::Vector3d(0.0, x(idx::kLeverArm), x(idx::kLeverArm + 1));
  const Eigen::Vector3d heading_err(0.0, 0.0, x(idx::kAtt + 2));
  const Eigen::Vector3d mount_err(0.0, x(idx::kMounting), x(idx::kMounting + 1));
  const Eigen::Vector3d omega_err =
      x.segment<3>(idx::kGyroBias) +
      p.omega.cwiseProduct(x.segment<3>(idx::kGyroScale));

  const Eigen::Vector3d predicted =
      r_n_v * (Eigen::Matrix3d::Identity() + geo::skew(heading_err)) *
          (p.nav.vel + x.segment<3>(idx::kVel)) +
      (Eigen::Matrix3d::Identity() - geo::skew(mount_err)) * r_b_v *
          (p.omega + omega_err).cross(lever3);

  // The state is truth-minus-estimate throughout, so the wheel speed the
  // filter computes from its mounting estimate corresponds to Euler angles
  // displaced by -x from the linearization point.
  const Eigen::Vector2d mounting_used =
      p.install.mounting - x.segment<2>(idx::kMounting);
  const double forward = wheel::body_to_wheel_rotation(mounting_used)
                             .row(0)
                             .dot(p.omega) *
                         p.install.effective_radius() *
                         (1.0 + x(idx::kRadiusScale));
  return predicted - Eigen::Vector3d(forward, 0.0, 0.0);
}

inline Eigen::Vector3d gnss_parent(const ModelPoint& p, const eskf::ErrorState& x) {
  const wheel::VehicleRotation vr =
      wheel::derive_vehicle_rotation(p.nav.att, p.install.mounting);
  const Eigen::Matrix3d r_v_b = (vr.r_n_v * p.nav.att).transpose();
  const Eigen::Vector3d mount_err(0.0, x(idx::kMounting), x(idx::kMounting + 1));

  geo::GeodeticPosition pos = p.nav.pos;
  const double rm = geo::meridian_radius(kOracleEarth, pos.lat) + pos.height;
  const double rn = geo::prime_vertical_radius(kOracleEarth, pos.lat) + pos.height;
  pos.lat += x(idx::kPos) / rm;
  pos.lon += x(idx::kPos + 1) / (rn * std::cos(p.nav.pos.lat));
  pos.height -= x(idx::kPos + 2);

  const Eigen::Matrix3d att =
      geo::exp_so3(-x.segment<3>(idx::kAtt)) * p.nav.att;
  const Eigen::Vector3d lever_b =
      p.install.leverarm3() +
      Eigen::Vector3d(0.0, x(idx::kLeverArm), x(idx::kLeverArm + 1)) +
      r_v_b * (Eigen::Matrix3d::Identity() + geo::skew(mount_err)) *
          p.install.antenna_lever_v;

  // Displacement form of the predicted antenna position with the common
  // n-to-earth rotation held at the linearization point, exactly as the
  // published difference treats it. The position part is the curvilinear
  // displacement, the inverse of the error injection above.
  const Eigen::Vector3d dpos((pos.lat - p.nav.pos.lat) * rm,
                             (pos.lon - p.nav.pos.lon) * rn *
                                 std::cos(p.nav.pos.lat),
                             -(pos.height - p.nav.pos.height));
  return dpos + att * lever_b;
}

inline Eigen::Vector2d wheel_rate_parent(const ModelPoint& p,
                                  const eskf::ErrorState& x) {
  const Eigen::Vector3d mount_err(0.0, x(idx::kMounting), x(idx::kMounting + 1));
  const Eigen::Vector3d omega_err =
      x.segment<3>(idx::kGyroBias) +
      p.omega.cwiseProduct(x.segment<3>(idx::kGyroScale));
  const Eigen::Vector3d full =
      (Eigen::Matrix3d::Identity() - geo::skew(mount_err)) *
      wheel::body_to_wheel_rotation(p.install.mounting) *
      (p.omega + omega_err);
  return full.tail<2>();
}

// Central-difference Jacobian of a parent function over the 26 error states.
template <typename Fn>
Eigen::MatrixXd numeric_jacobian(const Fn& fn, int rows) {
  // Steps sized per channel: the sensor-error and leverarm channels enter
  // linearly, so larger steps cost no truncation and suppress cancellation
  // noise; the rotational channels stay small for the trig terms.
  eskf::ErrorState eps = eskf::ErrorState::Constant(1e-6);
  eps.segment<3>(idx::kPos).setConstant(1.0);
  eps.segment<3>(idx::kVel).setConstant(1e-3);
  eps.segment<3>(idx::kGyroBias).setConstant(1e-3);
  eps.segment<3>(idx::kAccelBias).setConstant(1e-3);
  eps.segment<3>(idx::kGyroScale).setConstant(1e-3);
  eps.segment<3>(idx::kAccelScale).setConstant(1e-3);
  eps.segment<2>(idx::kLeverArm).setConstant(1e-3);
  eps(idx::kRadiusScale) = 1e-3;

  Eigen::MatrixXd jac(rows, idx::kDim);
  for (int j = 0; j < idx::kDim; ++j) {
    eskf::ErrorState plus = eskf::ErrorState::Zero();
    plus(j) = eps(j);
    eskf::ErrorState minus = eskf::ErrorState::Zero();
    minus(j) = -eps(j);
    jac.col(j) = (fn(plus) - fn(minus)) / (2.0 * eps(j));
  }
  return jac;
}

// Per-entry relative difference, scaled against the entry itself or, for
// entries far below their column's dynamic range, against 1e-3 of the
// column maximum (structural zeros only need to stay at noise level).
inline double max_relative_difference(const Eigen::MatrixXd& analytic,
                               const Eigen::MatrixXd& numeric,
                               bool verbose = false) {
  double worst = 0.0;
  int wi = -1, wj = -1;
  for (int j = 0; j < analytic.cols(); ++j) {
    const double col_floor =
        std::max(1e-3 * numeric.col(j).cwiseAbs().maxCoeff(), 1e-12);
    for (int i = 0; i < analytic.rows(); ++i) {
      const double denom = std::max(std::abs(numeric(i, j)), col_floor);
      const double rel = std::abs(analytic(i, j) - numeric(i, j)) / denom;
      if (rel > worst) {
        worst = rel;
        wi = i;
        wj = j;
      }
    }
  }
  if (verbose && worst > 1e-6) {
    std::printf("worst (%d,%d): analytic %.9e numeric %.9e rel %.3e\n", wi, wj,
                analytic(wi, wj), numeric(wi, wj), worst);
  }
  return worst;
}


}  // namespace hubnav::test_support
