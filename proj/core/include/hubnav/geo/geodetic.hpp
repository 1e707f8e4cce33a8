#pragma once

#include <Eigen/Core>

namespace hubnav::geo {

struct EarthModel;

/// Geodetic position on the WGS84 ellipsoid.
/// lat in [-pi/2, pi/2], lon wrapped to (-pi, pi], height in m above ellipsoid.
struct GeodeticPosition {
  double lat = 0.0;     // rad
  double lon = 0.0;     // rad
  double height = 0.0;  // m
};

/// North/east/down components, m or m/s depending on use.
using NedVector = Eigen::Vector3d;

/// Wrap an angle to (-pi, pi].
double wrap_pi(double angle);

Eigen::Vector3d geodetic_to_ecef(const EarthModel& earth,
                                 const GeodeticPosition& pos);

struct EcefToGeodeticResult {
  GeodeticPosition pos;
  bool converged = false;
  int iterations = 0;
};

/// Iterative (Bowring-style) inverse with a fixed iteration cap.
/// Fails (converged = false) only for points too close to the earth's center.
EcefToGeodeticResult ecef_to_geodetic(const EarthModel& earth,
                                      const Eigen::Vector3d& ecef);

/// Rotation matrix from the n-frame (NED) to the earth frame, R_n^e.
Eigen::Matrix3d n_to_e_rotation(const GeodeticPosition& pos);

/// NED displacement of `pos` relative to `ref`, m, resolved at `ref`.
Eigen::Vector3d ned_displacement(const EarthModel& earth,
                                 const GeodeticPosition& ref,
                                 const GeodeticPosition& pos);

/// Move a geodetic position by an NED displacement in meters.
GeodeticPosition offset_geodetic(const EarthModel& earth,
                                 const GeodeticPosition& pos,
                                 const Eigen::Vector3d& ned);

}  // namespace hubnav::geo
