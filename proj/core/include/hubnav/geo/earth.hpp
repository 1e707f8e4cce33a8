#pragma once

#include <Eigen/Core>

#include "hubnav/geo/geodetic.hpp"

namespace hubnav::geo {

/// WGS84 ellipsoid and gravity constants. Immutable after construction.
struct EarthModel {
  double semi_major_axis = 6378137.0;            // a, m
  double flattening = 1.0 / 298.257223563;       // f
  double rotation_rate = 7.292115e-5;            // omega_e, rad/s
  double gravity_equator = 9.7803253359;         // m/s^2, Somigliana
  double gravity_formula_k = 0.00193185265241;   // Somigliana constant
  double gravity_m = 0.00344978650684;           // omega^2 a^2 b / GM

  double eccentricity_sq() const {
    return flattening * (2.0 - flattening);
  }
};

inline constexpr double kDegToRad = 0.017453292519943295;
inline constexpr double kRadToDeg = 57.29577951308232;

/// Meridian radius of curvature R_M at latitude, m.
double meridian_radius(const EarthModel& earth, double lat);

/// Prime-vertical radius of curvature R_N at latitude, m.
double prime_vertical_radius(const EarthModel& earth, double lat);

/// Somigliana normal gravity with free-air height correction, m/s^2.
double normal_gravity(const EarthModel& earth, const GeodeticPosition& pos);

/// d(gravity)/d(height), 1/s^2. Used for the vertical gravity-gradient term.
double normal_gravity_height_gradient(const EarthModel& earth,
                                      const GeodeticPosition& pos);

/// Earth rotation rate and transport rate resolved in the n-frame.
struct EarthRates {
  Eigen::Vector3d omega_ie_n;  // earth rate, rad/s
  Eigen::Vector3d omega_en_n;  // transport rate, rad/s
  double rm = 0.0;             // meridian radius, m
  double rn = 0.0;             // prime-vertical radius, m
  bool near_pole = false;      // |lat| within 1e-9 of pi/2, tan(lat) unusable
};

EarthRates earth_rates(const EarthModel& earth, const GeodeticPosition& pos,
                       const Eigen::Vector3d& vel_ned);

}  // namespace hubnav::geo
