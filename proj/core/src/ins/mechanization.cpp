#include "hubnav/ins/mechanization.hpp"

#include <cmath>
#include <stdexcept>

#include "hubnav/geo/rotation.hpp"

namespace hubnav::ins {

using geo::skew;

namespace {

NavState propagate_with_increment(const geo::EarthModel& earth,
                                  const NavState& state, const ImuSample& prev,
                                  const ImuSample& cur,
                                  const Eigen::Vector3d& body_rotation) {
  const double dt = cur.t - prev.t;
  // The wheel spin makes the body-frame specific force swing at full gravity
  // amplitude, so the specific-force integral rotates the second sample into
  // the frame at the interval start (exact for a force that is constant in
  // the navigation frame, where a half-cross correction would leave a
  // rectified velocity drift) and integrates the de-rotated samples
  // trapezoidally. `body_rotation` is the full in-interval rotation vector,
  // coning compensation included.
  const Eigen::Matrix3d body_increment = geo::exp_so3(body_rotation);
  const Eigen::Vector3d force_integral =
      0.5 * dt * (prev.accel + body_increment * cur.accel);

  const geo::EarthRates rates = geo::earth_rates(earth, state.pos, state.vel);
  const Eigen::Vector3d omega_in = rates.omega_ie_n + rates.omega_en_n;
  const Eigen::Vector3d zeta = omega_in * dt;

  const Eigen::Vector3d dv_f_n =
      (Eigen::Matrix3d::Identity() - 0.5 * skew(zeta)) * state.att *
      force_integral;

  const Eigen::Vector3d gravity(
      0.0, 0.0, geo::normal_gravity(earth, state.pos));
  const Eigen::Vector3d coriolis_rate =
      2.0 * rates.omega_ie_n + rates.omega_en_n;

  // Gravity/Coriolis at the midpoint velocity, one fixed-point refinement.
  Eigen::Vector3d v_new = state.vel + dv_f_n +
                          (gravity - coriolis_rate.cross(state.vel)) * dt;
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::Vector3d v_mid = 0.5 * (state.vel + v_new);
    v_new = state.vel + dv_f_n +
            (gravity - coriolis_rate.cross(v_mid)) * dt;
  }

  // Trapezoidal position update through midpoint radii.
  const Eigen::Vector3d v_avg = 0.5 * (state.vel + v_new);
  geo::GeodeticPosition pos = state.pos;
  const double h_new = state.pos.height - v_avg.z() * dt;
  const double h_mid = 0.5 * (state.pos.height + h_new);
  double lat_new =
      state.pos.lat + v_avg.x() * dt / (rates.rm + h_mid);
  const double lat_mid = 0.5 * (state.pos.lat + lat_new);
  const double rm_mid = geo::meridian_radius(earth, lat_mid);
  const double rn_mid = geo::prime_vertical_radius(earth, lat_mid);
  lat_new = state.pos.lat + v_avg.x() * dt / (rm_mid + h_mid);
  pos.lat = lat_new;
  pos.lon = geo::wrap_pi(state.pos.lon +
                         v_avg.y() * dt / ((rn_mid + h_mid) * std::cos(lat_mid)));
  pos.height = h_new;

  NavState out;
  out.t = cur.t;
  out.pos = pos;
  out.vel = v_new;
  out.att = geo::orthonormalize(geo::exp_so3(-zeta) * state.att *
                                body_increment);
  return out;
}

void check_interval(const ImuSample& prev, const ImuSample& cur) {
  const double dt = cur.t - prev.t;
  if (dt <= 0.0) {
    throw std::invalid_argument("imu samples not strictly increasing in time");
  }
  if (dt > kMaxImuInterval) {
    throw std::invalid_argument("imu interval above mechanization bound");
  }
}

}  // namespace

NavState propagate(const geo::EarthModel& earth, const NavState& state,
                   const ImuSample& prev, const ImuSample& cur) {
  check_interval(prev, cur);
  const double dt = cur.t - prev.t;
  // Trapezoidal increment plus the classic two-sample coning term, exact
  // for a linearly varying rate.
  const Eigen::Vector3d dtheta =
      0.5 * (prev.gyro + cur.gyro) * dt +
      dt * dt / 12.0 * prev.gyro.cross(cur.gyro);
  return propagate_with_increment(earth, state, prev, cur, dtheta);
}

NavState propagate(const geo::EarthModel& earth, const NavState& state,
                   const ImuSample& prev2, const ImuSample& prev,
                   const ImuSample& cur) {
  check_interval(prev, cur);
  const double dt = cur.t - prev.t;
  const double dt_prev = prev.t - prev2.t;
  if (dt_prev <= 0.0 || std::abs(dt_prev - dt) > 0.05 * dt) {
    // Uneven history: fall back to the two-sample form.
    return propagate(earth, state, prev, cur);
  }
  // Quadratic rate model through the three samples (no phase lag across
  // ramps), integrated over the current interval with rotation-composed
  // substeps. Substepping matters under coning motion: with the yaw axis
  // precessing in the spinning body frame, a single-interval coning term
  // leaves an O(dt^3)-per-step drift that accumulates coherently around
  // turns.
  constexpr int kSubsteps = 8;
  auto model_rate = [&](double tau) {
    // tau in [0, 1] across [prev.t, cur.t]; nodes at tau = -1, 0, 1.
    const Eigen::Vector3d half_slope = 0.5 * (cur.gyro - prev2.gyro);
    const Eigen::Vector3d curvature =
        0.5 * (cur.gyro - 2.0 * prev.gyro + prev2.gyro);
    return (prev.gyro + tau * half_slope + tau * tau * curvature).eval();
  };
  Eigen::Matrix3d increment = Eigen::Matrix3d::Identity();
  const double h = dt / kSubsteps;
  for (int k = 0; k < kSubsteps; ++k) {
    const Eigen::Vector3d w0 = model_rate(static_cast<double>(k) / kSubsteps);
    const Eigen::Vector3d w1 =
        model_rate(static_cast<double>(k + 1) / kSubsteps);
    const Eigen::Vector3d step =
        0.5 * (w0 + w1) * h + h * h / 12.0 * w0.cross(w1);
    increment = increment * geo::exp_so3(step);
  }
  return propagate_with_increment(earth, state, prev, cur,
                                  geo::log_so3(increment));
}

}  // namespace hubnav::ins
