#include "hubnav/sim/simulator.hpp"

#include <cmath>
#include <stdexcept>

#include "hubnav/geo/rotation.hpp"
#include "hubnav/sim/random.hpp"

namespace hubnav::sim {

void SimConfig::zero_errors() {
  gyro_bias_std = 0.0;
  accel_bias_std = 0.0;
  gyro_scale_std = 0.0;
  accel_scale_std = 0.0;
  angle_random_walk = 0.0;
  velocity_random_walk = 0.0;
  gnss_std_m = 0.0;
}

Simulator::Simulator(const geo::EarthModel& earth, const SimConfig& config)
    : earth_(earth),
      config_(config),
      model_(earth, config.trajectory, config.wheel_radius_true) {
  rm_origin_ = geo::meridian_radius(earth_, config.trajectory.origin.lat) +
               config.trajectory.origin.height;
  rn_origin_ =
      geo::prime_vertical_radius(earth_, config.trajectory.origin.lat) +
      config.trajectory.origin.height;
  if (config_.imu_rate_hz <= 0.0 || config_.gnss_rate_hz <= 0.0 ||
      config_.wheel_radius_true <= 0.0) {
    throw std::invalid_argument("invalid simulator configuration");
  }
  if (config_.dt_internal <= 0.0 || config_.dt_internal > 1e-3 ||
      config_.dt_internal > 0.1 / config_.imu_rate_hz) {
    throw std::invalid_argument(
        "differencing step must be at most a tenth of the IMU interval");
  }
  for (const auto& [start, end] : config_.outage_windows) {
    if (!(start >= 0.0 && end > start && start < model_.duration())) {
      throw std::invalid_argument("outage window outside the run");
    }
  }

  // Per-run sensor-error truth, drawn deterministically from the seed.
  GaussianStream draw(config_.seed);
  for (int i = 0; i < 3; ++i) imu_errors_.gyro_bias[i] = draw.next(config_.gyro_bias_std);
  for (int i = 0; i < 3; ++i) imu_errors_.accel_bias[i] = draw.next(config_.accel_bias_std);
  for (int i = 0; i < 3; ++i) imu_errors_.gyro_scale[i] = draw.next(config_.gyro_scale_std);
  for (int i = 0; i < 3; ++i) imu_errors_.accel_scale[i] = draw.next(config_.accel_scale_std);
}

Eigen::Matrix3d Simulator::body_attitude(double t) const {
  const double psi_w = model_.heading(t) + M_PI / 2.0;
  return geo::rotation_z(psi_w) * geo::rotation_x(model_.wheel_angle(t)) *
         wheel::body_to_wheel_rotation(config_.mounting_true);
}

// Leverarm offset of the IMU from the wheel center in the n-frame and its
// exact time derivative (the body spins, the lever is fixed in the body).
Eigen::Vector3d Simulator::lever_offset_n(double t) const {
  const Eigen::Vector3d lever3(0.0, config_.leverarm_true.x(),
                               config_.leverarm_true.y());
  return -(body_attitude(t) * lever3);
}

Eigen::Vector3d Simulator::lever_offset_rate_n(double t) const {
  const Eigen::Vector3d lever3(0.0, config_.leverarm_true.x(),
                               config_.leverarm_true.y());
  const double psi_w = model_.heading(t) + M_PI / 2.0;
  const Eigen::Vector3d omega_nb_n =
      model_.yaw_rate(t) * Eigen::Vector3d::UnitZ() +
      model_.wheel_rate(t) * geo::rotation_z(psi_w) * Eigen::Vector3d::UnitX();
  const Eigen::Matrix3d att = body_attitude(t);
  return -(omega_nb_n.cross(att * lever3));
}

geo::GeodeticPosition Simulator::imu_position(double t) const {
  // Planar chart with the curvature radii frozen at the origin; all truth
  // geometry lives in this chart so nearby differences stay exact.
  const geo::GeodeticPosition& origin = config_.trajectory.origin;
  const Eigen::Vector2d ne = model_.planar_position(t);
  const Eigen::Vector3d o = lever_offset_n(t);
  geo::GeodeticPosition pos;
  pos.lat = origin.lat + (ne.x() + o.x()) / rm_origin_;
  pos.lon = origin.lon + (ne.y() + o.y()) / (rn_origin_ * std::cos(origin.lat));
  pos.height = origin.height - o.z();
  return pos;
}

geo::NedVector Simulator::imu_velocity(double t) const {
  // Curvilinear NED velocity consistent with the mechanization convention:
  // vN = d(lat)/dt (Rm(lat) + h), etc. The chart rate is analytic.
  const geo::GeodeticPosition& origin = config_.trajectory.origin;
  const geo::NedVector wheel_v = model_.wheel_velocity(t);
  const Eigen::Vector3d o = lever_offset_n(t);
  const Eigen::Vector3d o_rate = lever_offset_rate_n(t);
  const Eigen::Vector2d ne = model_.planar_position(t);

  const double lat = origin.lat + (ne.x() + o.x()) / rm_origin_;
  const double height = origin.height - o.z();
  const double rm = geo::meridian_radius(earth_, lat) + height;
  const double rn = geo::prime_vertical_radius(earth_, lat) + height;

  geo::NedVector v;
  v.x() = (wheel_v.x() + o_rate.x()) * rm / rm_origin_;
  v.y() = (wheel_v.y() + o_rate.y()) * rn * std::cos(lat) /
          (rn_origin_ * std::cos(origin.lat));
  v.z() = o_rate.z();
  return v;
}

Eigen::Vector3d Simulator::true_gyro(double t) const {
  // The body rate has a closed form: yaw about the vertical plus wheel spin
  // about the (horizontal) wheel axis.
  const double psi_w = model_.heading(t) + M_PI / 2.0;
  const Eigen::Vector3d omega_nb_n =
      model_.yaw_rate(t) * Eigen::Vector3d::UnitZ() +
      model_.wheel_rate(t) * geo::rotation_z(psi_w) * Eigen::Vector3d::UnitX();

  const geo::EarthRates rates =
      geo::earth_rates(earth_, imu_position(t), imu_velocity(t));
  Eigen::Vector3d omega_in_n = rates.omega_en_n;
  if (config_.include_earth_rotation) {
    omega_in_n += rates.omega_ie_n;
  }
  return body_attitude(t).transpose() * (omega_nb_n + omega_in_n);
}

Eigen::Vector3d Simulator::true_accel(double t) const {
  // Coordinate acceleration from one centered difference of the analytic
  // curvilinear velocity (differencing positions instead would amplify
  // representation noise by 1/dt^2 and random-walk the roundtrip).
  const double d = config_.dt_internal;
  const Eigen::Vector3d accel_ned =
      (imu_velocity(t + d) - imu_velocity(t - d)) / (2.0 * d);

  const geo::GeodeticPosition center = imu_position(t);
  const geo::NedVector vel = imu_velocity(t);
  const geo::EarthRates rates = geo::earth_rates(earth_, center, vel);
  Eigen::Vector3d coriolis_rate = rates.omega_en_n;
  if (config_.include_earth_rotation) {
    coriolis_rate += 2.0 * rates.omega_ie_n;
  }
  const Eigen::Vector3d gravity(0.0, 0.0, geo::normal_gravity(earth_, center));
  const Eigen::Vector3d f_n = accel_ned + coriolis_rate.cross(vel) - gravity;
  return body_attitude(t).transpose() * f_n;
}

std::vector<TruthRecord> Simulator::truth(double dt) const {
  if (dt <= 0.0) throw std::invalid_argument("truth step must be positive");
  std::vector<TruthRecord> out;
  const auto count = static_cast<std::size_t>(model_.duration() / dt);
  out.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    out.push_back(truth_at(static_cast<double>(i) * dt));
  }
  return out;
}

TruthRecord Simulator::truth_at(double t) const {
  TruthRecord rec;
  rec.t = t;
  rec.pos = model_.wheel_position(t);
  rec.vel = model_.wheel_velocity(t);
  rec.vehicle_heading = model_.heading(t);
  rec.wheel_angle = model_.wheel_angle(t);
  rec.att = body_attitude(t);
  return rec;
}

std::vector<ins::ImuSample> Simulator::synthesize_imu() const {
  const double imu_dt = 1.0 / config_.imu_rate_hz;
  // Stay clear of the trajectory end so the centered differences never
  // straddle the boundary clamp.
  const auto count = static_cast<std::size_t>(std::floor(
      (model_.duration() - 2.0 * config_.dt_internal) / imu_dt + 1e-9));
  GaussianStream noise(config_.seed ^ 0x9e3779b97f4a7c15ull);
  const double gyro_noise_std =
      config_.angle_random_walk * std::sqrt(config_.imu_rate_hz);
  const double accel_noise_std =
      config_.velocity_random_walk * std::sqrt(config_.imu_rate_hz);

  std::vector<ins::ImuSample> out;
  out.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    const double t = static_cast<double>(i) * imu_dt;
    ins::ImuSample s;
    s.t = t;
    const Eigen::Vector3d gyro = true_gyro(t);
    const Eigen::Vector3d accel = true_accel(t);
    for (int k = 0; k < 3; ++k) {
      s.gyro[k] = (1.0 + imu_errors_.gyro_scale[k]) * gyro[k] +
                  imu_errors_.gyro_bias[k] + noise.next(gyro_noise_std);
      s.accel[k] = (1.0 + imu_errors_.accel_scale[k]) * accel[k] +
                   imu_errors_.accel_bias[k] + noise.next(accel_noise_std);
    }
    out.push_back(s);
  }
  return out;
}

std::vector<wheel::GnssFix> Simulator::synthesize_gnss() const {
  const double gnss_dt = 1.0 / config_.gnss_rate_hz;
  const auto count =
      static_cast<std::size_t>(std::floor(model_.duration() / gnss_dt + 1e-9));
  GaussianStream noise(config_.seed ^ 0xc2b2ae3d27d4eb4full);

  std::vector<wheel::GnssFix> out;
  out.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    const double t = static_cast<double>(i) * gnss_dt;
    // Draw noise for every epoch so outage windows change nothing else.
    const Eigen::Vector3d eps(noise.next(config_.gnss_std_m),
                              noise.next(config_.gnss_std_m),
                              noise.next(config_.gnss_std_m));
    bool in_outage = false;
    for (const auto& [start, end] : config_.outage_windows) {
      if (t >= start && t < end) {
        in_outage = true;
        break;
      }
    }
    if (in_outage) continue;

    const Eigen::Vector3d antenna_offset_n =
        body_attitude(t) * Eigen::Vector3d(0.0, config_.leverarm_true.x(),
                                           config_.leverarm_true.y()) +
        geo::rotation_z(model_.heading(t)) * config_.antenna_lever_v;
    wheel::GnssFix fix;
    fix.t = t;
    fix.pos = geo::offset_geodetic(earth_, imu_position(t),
                                   antenna_offset_n + eps);
    fix.std = Eigen::Vector3d::Constant(std::max(config_.gnss_std_m, 1e-4));
    out.push_back(fix);
  }
  return out;
}

ins::NavState Simulator::imu_nav_state(double t) const {
  ins::NavState nav;
  nav.t = t;
  nav.pos = imu_position(t);
  nav.vel = imu_velocity(t);
  nav.att = body_attitude(t);
  return nav;
}

double Simulator::roundtrip_check() const {
  SimConfig clean = config_;
  clean.zero_errors();
  Simulator noise_free(earth_, clean);
  const std::vector<ins::ImuSample> imu = noise_free.synthesize_imu();

  ins::NavState nav = noise_free.imu_nav_state(0.0);
  double worst = 0.0;
  for (std::size_t i = 1; i < imu.size(); ++i) {
    nav = (i >= 2) ? ins::propagate(earth_, nav, imu[i - 2], imu[i - 1], imu[i])
                   : ins::propagate(earth_, nav, imu[i - 1], imu[i]);
    const Eigen::Vector3d err = geo::ned_displacement(
        earth_, noise_free.imu_position(nav.t), nav.pos);
    worst = std::max(worst, err.head<2>().norm());
  }
  return worst;
}

}  // namespace hubnav::sim
