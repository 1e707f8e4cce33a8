#pragma once

#include "hubnav/eskf/state_index.hpp"
#include "hubnav/geo/earth.hpp"
#include "hubnav/ins/mechanization.hpp"

namespace hubnav::eskf {

/// Continuous-time driving-noise densities and Gauss-Markov parameters.
struct ProcessNoiseConfig {
  double angle_random_walk =
      0.24 * 0.017453292519943295 / 60.0;     // rad/sqrt(s) (0.24 deg/sqrt(h))
  double velocity_random_walk = 0.05;         // m/s/sqrt(s)  (3 m/s/sqrt(h))
  double gyro_bias_std =
      200.0 * 0.017453292519943295 / 3600.0;  // rad/s (200 deg/h)
  double gyro_bias_tau = 3600.0;              // s
  double accel_bias_std = 0.01;               // m/s^2
  double accel_bias_tau = 3600.0;             // s
  double gyro_scale_std = 0.03;               // unitless
  double gyro_scale_tau = 3600.0;             // s
  double accel_scale_std = 0.03;              // unitless
  double accel_scale_tau = 3600.0;            // s
  double leverarm_rw = 1e-5;                  // m/sqrt(s)
  double mounting_rw = 1e-6;                  // rad/sqrt(s)
  double radius_scale_rw = 1e-6;              // 1/sqrt(s)
};

/// Continuous-time error dynamics matrix F at the given linearization point.
/// `sample` carries the compensated angular rate and specific force.
StateMatrix build_error_dynamics(const geo::EarthModel& earth,
                                 const ins::NavState& nav,
                                 const ins::ImuSample& sample,
                                 const ProcessNoiseConfig& noise);

struct DiscreteModel {
  StateMatrix phi;  // first-order transition, I + F dt
  StateMatrix qd;   // trapezoidal discrete process noise
};

/// Qd = 0.5 (Phi G Q G' Phi' + G Q G') dt, symmetric PSD by construction.
DiscreteModel discretize(const StateMatrix& error_dynamics,
                         const ProcessNoiseConfig& noise,
                         const ins::NavState& nav,
                         const ins::ImuSample& sample, double dt);

}  // namespace hubnav::eskf
