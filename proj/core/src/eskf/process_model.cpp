#include "hubnav/eskf/process_model.hpp"

#include <cmath>

#include "hubnav/geo/rotation.hpp"

namespace hubnav::eskf {

using geo::skew;
namespace {

// d(n-frame tilt from position error)/d(delta_p) and d(omega_en)/d(delta_v):
// both equal the curvature map  [0 1/(Rn+h) 0; -1/(Rm+h) 0 0; 0 -tan(L)/(Rn+h) 0].
Eigen::Matrix3d curvature_map(double rm_h, double rn_h, double tan_lat) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  m(0, 1) = 1.0 / rn_h;
  m(1, 0) = -1.0 / rm_h;
  m(2, 1) = -tan_lat / rn_h;
  return m;
}

}  // namespace

StateMatrix build_error_dynamics(const geo::EarthModel& earth,
                                 const ins::NavState& nav,
                                 const ins::ImuSample& sample,
                                 const ProcessNoiseConfig& noise) {
  using namespace idx;
  StateMatrix f = StateMatrix::Zero();

  const double lat = nav.pos.lat;
  const double sl = std::sin(lat);
  const double cl = std::cos(lat);
  const double tl = sl / cl;
  const double e2 = earth.eccentricity_sq();
  const double w2 = 1.0 - e2 * sl * sl;

  const geo::EarthRates rates = geo::earth_rates(earth, nav.pos, nav.vel);
  const double rm_h = rates.rm + nav.pos.height;
  const double rn_h = rates.rn + nav.pos.height;
  const double drm_dlat = 3.0 * rates.rm * e2 * sl * cl / w2;
  const double drn_dlat = rates.rn * e2 * sl * cl / w2;

  const Eigen::Vector3d& v = nav.vel;
  const Eigen::Vector3d omega_in = rates.omega_ie_n + rates.omega_en_n;
  const Eigen::Vector3d f_n = nav.att * sample.accel;

  // Sensitivities of the earth and transport rates to the NED position error.
  // Column 0 is the latitude channel (scaled by 1/(Rm+h)), column 2 the
  // height channel (scaled by -1 for down-positive delta_p).
  Eigen::Matrix3d j_ie_p = Eigen::Matrix3d::Zero();
  j_ie_p(0, 0) = -earth.rotation_rate * sl / rm_h;
  j_ie_p(2, 0) = -earth.rotation_rate * cl / rm_h;

  Eigen::Matrix3d j_en_p = Eigen::Matrix3d::Zero();
  j_en_p(0, 0) = -v.y() * drn_dlat / (rn_h * rn_h) / rm_h;
  j_en_p(1, 0) = v.x() * drm_dlat / (rm_h * rm_h) / rm_h;
  j_en_p(2, 0) =
      (-v.y() / (cl * cl * rn_h) + v.y() * tl * drn_dlat / (rn_h * rn_h)) / rm_h;
  j_en_p(0, 2) = v.y() / (rn_h * rn_h);
  j_en_p(1, 2) = -v.x() / (rm_h * rm_h);
  j_en_p(2, 2) = -v.y() * tl / (rn_h * rn_h);

  const Eigen::Matrix3d j_en_v = curvature_map(rm_h, rn_h, tl);

  // Position error row.
  f.block<3, 3>(kPos, kPos) =
      -skew(rates.omega_en_n) - skew(v) * curvature_map(rm_h, rn_h, tl);
  f.block<3, 3>(kPos, kVel) = Eigen::Matrix3d::Identity();

  // Velocity error row.
  Eigen::Matrix3d dv_dp = skew(v) * (2.0 * j_ie_p + j_en_p);
  dv_dp(2, 2) += -geo::normal_gravity_height_gradient(earth, nav.pos);
  f.block<3, 3>(kVel, kPos) = dv_dp;
  f.block<3, 3>(kVel, kVel) =
      skew(v) * j_en_v - skew(2.0 * rates.omega_ie_n + rates.omega_en_n);
  f.block<3, 3>(kVel, kAtt) = skew(f_n);
  f.block<3, 3>(kVel, kAccelBias) = nav.att;
  f.block<3, 3>(kVel, kAccelScale) = nav.att * sample.accel.asDiagonal();

  // Attitude error row.
  f.block<3, 3>(kAtt, kPos) = j_ie_p + j_en_p;
  f.block<3, 3>(kAtt, kVel) = j_en_v;
  f.block<3, 3>(kAtt, kAtt) = -skew(omega_in);
  f.block<3, 3>(kAtt, kGyroBias) = -nav.att;
  f.block<3, 3>(kAtt, kGyroScale) = -nav.att * sample.gyro.asDiagonal();

  // First-order Gauss-Markov sensor errors.
  f.block<3, 3>(kGyroBias, kGyroBias) =
      -Eigen::Matrix3d::Identity() / noise.gyro_bias_tau;
  f.block<3, 3>(kAccelBias, kAccelBias) =
      -Eigen::Matrix3d::Identity() / noise.accel_bias_tau;
  f.block<3, 3>(kGyroScale, kGyroScale) =
      -Eigen::Matrix3d::Identity() / noise.gyro_scale_tau;
  f.block<3, 3>(kAccelScale, kAccelScale) =
      -Eigen::Matrix3d::Identity() / noise.accel_scale_tau;

  // Installation parameters are random walks: zero dynamics.
  return f;
}

DiscreteModel discretize(const StateMatrix& error_dynamics,
                         const ProcessNoiseConfig& noise,
                         const ins::NavState& nav,
                         const ins::ImuSample& sample, double dt) {
  using namespace idx;
  (void)sample;

  constexpr int kNoiseDim = 23;
  Eigen::Matrix<double, kDim, kNoiseDim> g =
      Eigen::Matrix<double, kDim, kNoiseDim>::Zero();
  g.block<3, 3>(kVel, 0) = nav.att;                          // accel white noise
  g.block<3, 3>(kAtt, 3) = -nav.att;                         // gyro white noise
  g.block<3, 3>(kGyroBias, 6).setIdentity();
  g.block<3, 3>(kAccelBias, 9).setIdentity();
  g.block<3, 3>(kGyroScale, 12).setIdentity();
  g.block<3, 3>(kAccelScale, 15).setIdentity();
  g.block<2, 2>(kLeverArm, 18).setIdentity();
  g.block<2, 2>(kMounting, 20).setIdentity();
  g(kRadiusScale, 22) = 1.0;

  Eigen::Matrix<double, kNoiseDim, 1> q_diag;
  const double vrw2 = noise.velocity_random_walk * noise.velocity_random_walk;
  const double arw2 = noise.angle_random_walk * noise.angle_random_walk;
  q_diag.segment<3>(0).setConstant(vrw2);
  q_diag.segment<3>(3).setConstant(arw2);
  q_diag.segment<3>(6).setConstant(
      2.0 * noise.gyro_bias_std * noise.gyro_bias_std / noise.gyro_bias_tau);
  q_diag.segment<3>(9).setConstant(
      2.0 * noise.accel_bias_std * noise.accel_bias_std / noise.accel_bias_tau);
  q_diag.segment<3>(12).setConstant(
      2.0 * noise.gyro_scale_std * noise.gyro_scale_std / noise.gyro_scale_tau);
  q_diag.segment<3>(15).setConstant(
      2.0 * noise.accel_scale_std * noise.accel_scale_std /
      noise.accel_scale_tau);
  q_diag.segment<2>(18).setConstant(noise.leverarm_rw * noise.leverarm_rw);
  q_diag.segment<2>(20).setConstant(noise.mounting_rw * noise.mounting_rw);
  q_diag(22) = noise.radius_scale_rw * noise.radius_scale_rw;

  const StateMatrix gqg = g * q_diag.asDiagonal() * g.transpose();

  DiscreteModel out;
  out.phi = StateMatrix::Identity() + error_dynamics * dt;
  out.qd = 0.5 * dt * (out.phi * gqg * out.phi.transpose() + gqg);
  out.qd = 0.5 * (out.qd + out.qd.transpose()).eval();
  return out;
}

}  // namespace hubnav::eskf
