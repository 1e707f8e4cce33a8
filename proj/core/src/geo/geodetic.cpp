#include "hubnav/geo/geodetic.hpp"

#include <cmath>

#include "hubnav/geo/earth.hpp"

namespace hubnav::geo {

double wrap_pi(double angle) {
  double a = std::fmod(angle, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

Eigen::Vector3d geodetic_to_ecef(const EarthModel& earth,
                                 const GeodeticPosition& pos) {
  const double rn = prime_vertical_radius(earth, pos.lat);
  const double cl = std::cos(pos.lat);
  const double sl = std::sin(pos.lat);
  const double e2 = earth.eccentricity_sq();
  return Eigen::Vector3d((rn + pos.height) * cl * std::cos(pos.lon),
                         (rn + pos.height) * cl * std::sin(pos.lon),
                         (rn * (1.0 - e2) + pos.height) * sl);
}

EcefToGeodeticResult ecef_to_geodetic(const EarthModel& earth,
                                      const Eigen::Vector3d& ecef) {
  EcefToGeodeticResult out;
  const double e2 = earth.eccentricity_sq();
  const double p = std::hypot(ecef.x(), ecef.y());

  if (p + std::abs(ecef.z()) < 1.0) {
    // Degenerate: at (or numerically at) the earth's center.
    return out;
  }

  out.pos.lon = (p < 1e-12) ? 0.0 : std::atan2(ecef.y(), ecef.x());

  // Fixed-point iteration on latitude; converges quadratically near the
  // surface and comfortably within the cap for |h| < 1e6 m.
  constexpr int kMaxIterations = 20;
  constexpr double kTol = 1e-13;  // rad; ~1e-6 m horizontally
  double lat = std::atan2(ecef.z(), p * (1.0 - e2));
  double h = 0.0;
  for (int i = 0; i < kMaxIterations; ++i) {
    const double rn = prime_vertical_radius(earth, lat);
    const double sl = std::sin(lat);
    h = (p > std::abs(ecef.z()))
            ? p / std::cos(lat) - rn
            : ecef.z() / sl - rn * (1.0 - e2);
    const double lat_next = std::atan2(ecef.z(), p * (1.0 - e2 * rn / (rn + h)));
    out.iterations = i + 1;
    if (std::abs(lat_next - lat) < kTol) {
      lat = lat_next;
      out.converged = true;
      break;
    }
    lat = lat_next;
  }
  out.pos.lat = lat;
  out.pos.height = h;
  return out;
}

Eigen::Matrix3d n_to_e_rotation(const GeodeticPosition& pos) {
  const double sl = std::sin(pos.lat);
  const double cl = std::cos(pos.lat);
  const double so = std::sin(pos.lon);
  const double co = std::cos(pos.lon);
  Eigen::Matrix3d r;
  r << -sl * co, -so, -cl * co,
       -sl * so,  co, -cl * so,
        cl,      0.0, -sl;
  return r;
}

Eigen::Vector3d ned_displacement(const EarthModel& earth,
                                 const GeodeticPosition& ref,
                                 const GeodeticPosition& pos) {
  const Eigen::Vector3d d =
      geodetic_to_ecef(earth, pos) - geodetic_to_ecef(earth, ref);
  return n_to_e_rotation(ref).transpose() * d;
}

GeodeticPosition offset_geodetic(const EarthModel& earth,
                                 const GeodeticPosition& pos,
                                 const Eigen::Vector3d& ned) {
  const double rm_h = meridian_radius(earth, pos.lat) + pos.height;
  const double rn_h = prime_vertical_radius(earth, pos.lat) + pos.height;
  GeodeticPosition out = pos;
  out.lat += ned.x() / rm_h;
  out.lon += ned.y() / (rn_h * std::cos(pos.lat));
  out.height -= ned.z();
  out.lon = wrap_pi(out.lon);
  return out;
}

}  // namespace hubnav::geo
