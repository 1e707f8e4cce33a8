#include "hubnav/geo/earth.hpp"

#include <cmath>

namespace hubnav::geo {

double meridian_radius(const EarthModel& earth, double lat) {
  const double e2 = earth.eccentricity_sq();
  const double s = std::sin(lat);
  const double w2 = 1.0 - e2 * s * s;
  return earth.semi_major_axis * (1.0 - e2) / (w2 * std::sqrt(w2));
}

double prime_vertical_radius(const EarthModel& earth, double lat) {
  const double e2 = earth.eccentricity_sq();
  const double s = std::sin(lat);
  return earth.semi_major_axis / std::sqrt(1.0 - e2 * s * s);
}

double normal_gravity(const EarthModel& earth, const GeodeticPosition& pos) {
  const double s2 = std::sin(pos.lat) * std::sin(pos.lat);
  const double g0 = earth.gravity_equator * (1.0 + earth.gravity_formula_k * s2) /
                    std::sqrt(1.0 - earth.eccentricity_sq() * s2);
  // Free-air correction, first order in h/a plus the quadratic term.
  const double a = earth.semi_major_axis;
  const double f = earth.flattening;
  const double m = earth.gravity_m;
  const double h = pos.height;
  return g0 * (1.0 - 2.0 / a * (1.0 + f + m - 2.0 * f * s2) * h +
               3.0 * h * h / (a * a));
}

double normal_gravity_height_gradient(const EarthModel& earth,
                                      const GeodeticPosition& pos) {
  const double s2 = std::sin(pos.lat) * std::sin(pos.lat);
  const double g0 = earth.gravity_equator * (1.0 + earth.gravity_formula_k * s2) /
                    std::sqrt(1.0 - earth.eccentricity_sq() * s2);
  const double a = earth.semi_major_axis;
  const double f = earth.flattening;
  const double m = earth.gravity_m;
  return g0 * (-2.0 / a * (1.0 + f + m - 2.0 * f * s2) +
               6.0 * pos.height / (a * a));
}

EarthRates earth_rates(const EarthModel& earth, const GeodeticPosition& pos,
                       const Eigen::Vector3d& vel_ned) {
  EarthRates out;
  const double lat = pos.lat;
  out.rm = meridian_radius(earth, lat);
  out.rn = prime_vertical_radius(earth, lat);
  out.near_pole = std::abs(std::abs(lat) - M_PI / 2.0) < 1e-9;

  const double sl = std::sin(lat);
  const double cl = std::cos(lat);
  out.omega_ie_n =
      Eigen::Vector3d(earth.rotation_rate * cl, 0.0, -earth.rotation_rate * sl);

  const double rm_h = out.rm + pos.height;
  const double rn_h = out.rn + pos.height;
  const double tan_lat = out.near_pole ? 0.0 : std::tan(lat);
  out.omega_en_n = Eigen::Vector3d(vel_ned.y() / rn_h, -vel_ned.x() / rm_h,
                                   -vel_ned.y() * tan_lat / rn_h);
  return out;
}

}  // namespace hubnav::geo
