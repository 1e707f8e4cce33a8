#pragma once

#include <Eigen/Core>

#include "hubnav/geo/earth.hpp"
#include "hubnav/geo/geodetic.hpp"
#include "hubnav/ins/imu.hpp"

namespace hubnav::ins {

/// Full navigation solution at one epoch. Attitude maps body to n-frame.
struct NavState {
  double t = 0.0;
  geo::GeodeticPosition pos;
  geo::NedVector vel = geo::NedVector::Zero();  // m/s
  Eigen::Matrix3d att = Eigen::Matrix3d::Identity();  // R_b^n
};

inline constexpr double kMaxImuInterval = 0.02;  // s, >= 50 Hz streams only

/// One strapdown step from `prev` to `cur` (compensated samples).
///
/// Attitude: single-interval rotation vector with two-sample averaged rate,
/// with the n-frame rotation (earth rate + transport rate) compensated.
/// Velocity: averaged specific force with in-interval rotation correction,
/// Coriolis and gravity applied at the interval midpoint (one fixed-point
/// refinement of the midpoint velocity). Position: trapezoidal integration
/// of velocity through the curvature radii. Attitude is re-orthonormalized
/// every step.
///
/// Throws std::invalid_argument on non-monotonic time or dt > kMaxImuInterval.
NavState propagate(const geo::EarthModel& earth, const NavState& state,
                   const ImuSample& prev, const ImuSample& cur);

/// Three-sample variant: a causal quadratic rate model over
/// (prev2, prev, cur) removes the trapezoid phase lag of the angular
/// increment, which would otherwise rectify into a velocity offset across
/// rate ramps. Used whenever one more sample of history is available.
NavState propagate(const geo::EarthModel& earth, const NavState& state,
                   const ImuSample& prev2, const ImuSample& prev,
                   const ImuSample& cur);

}  // namespace hubnav::ins
