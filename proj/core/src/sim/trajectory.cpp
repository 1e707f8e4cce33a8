#include "hubnav/sim/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hubnav::sim {

namespace {

// Smoothstep speed blend v0 -> v1 over duration dt: continuous acceleration
// at both ends, same covered distance as the linear ramp.
double blend_speed(double v0, double v1, double u) {
  return v0 + (v1 - v0) * u * u * (3.0 - 2.0 * u);
}

double blend_distance(double v0, double v1, double dt, double u) {
  // Integral of the blend: v0 dt u + (v1 - v0) dt (u^3 - u^4 / 2).
  return v0 * dt * u + (v1 - v0) * dt * u * u * u * (1.0 - 0.5 * u);
}

}  // namespace

Segment Segment::straight(double length, double speed) {
  Segment s;
  s.type = Type::kStraight;
  s.length = length;
  s.speed = speed;
  return s;
}

Segment Segment::arc(double radius, double sweep, double speed) {
  Segment s;
  s.type = Type::kArc;
  s.radius = radius;
  s.sweep = sweep;
  s.length = radius * std::abs(sweep);
  s.speed = speed;
  return s;
}

Segment Segment::dwell(double duration) {
  Segment s;
  s.type = Type::kDwell;
  s.duration = duration;
  return s;
}

TrajectoryModel::TrajectoryModel(const geo::EarthModel& earth,
                                 const TrajectorySpec& spec,
                                 double wheel_radius)
    : wheel_radius_(wheel_radius), origin_(spec.origin) {
  if (spec.segments.empty()) {
    throw std::invalid_argument("trajectory has no segments");
  }
  if (wheel_radius <= 0.0) {
    throw std::invalid_argument("wheel radius must be positive");
  }
  const double accel = spec.accel_limit;
  if (accel <= 0.0) {
    throw std::invalid_argument("accel limit must be positive");
  }
  for (const Segment& seg : spec.segments) {
    const bool ok =
        (seg.type == Segment::Type::kDwell && seg.duration > 0.0) ||
        (seg.type == Segment::Type::kStraight && seg.length > 0.0 &&
         seg.speed > 0.0) ||
        (seg.type == Segment::Type::kArc && seg.radius > wheel_radius_ &&
         seg.sweep != 0.0 && seg.speed > 0.0);
    if (!ok) throw std::invalid_argument("invalid trajectory segment");
  }

  rm_origin_ = geo::meridian_radius(earth, origin_.lat) + origin_.height;
  rn_origin_ =
      geo::prime_vertical_radius(earth, origin_.lat) + origin_.height;

  // Boundary speeds: stop for dwell neighbours, otherwise the slower target.
  const std::size_t n = spec.segments.size();
  std::vector<double> entry(n + 1, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const Segment& a = spec.segments[k - 1];
    const Segment& b = spec.segments[k];
    entry[k] = (a.type == Segment::Type::kDwell ||
                b.type == Segment::Type::kDwell)
                   ? 0.0
                   : std::min(a.speed, b.speed);
  }
  entry[n] = spec.segments.back().type == Segment::Type::kDwell
                 ? 0.0
                 : spec.segments.back().speed;

  double t = 0.0, s = 0.0, psi = spec.initial_heading;
  Eigen::Vector2d ne = Eigen::Vector2d::Zero();
  auto push_constant = [&](double v, double dt) {
    if (dt <= 1e-12) return;
    profile_.push_back(
        {ProfilePiece::Kind::kConstant, t, dt, s, v, v});
    t += dt;
    s += v * dt;
  };
  auto push_blend = [&](double v0, double v1, double dt) {
    if (dt <= 1e-12) return;
    profile_.push_back({ProfilePiece::Kind::kBlend, t, dt, s, v0, v1});
    t += dt;
    s += 0.5 * (v0 + v1) * dt;
  };

  for (std::size_t k = 0; k < n; ++k) {
    const Segment& seg = spec.segments[k];
    if (seg.type == Segment::Type::kDwell) {
      geometry_.push_back({s, s, psi, 0.0, ne});
      push_constant(0.0, seg.duration);
      continue;
    }
    const double curvature =
        seg.type == Segment::Type::kArc
            ? (seg.sweep > 0 ? 1.0 : -1.0) / seg.radius
            : 0.0;
    geometry_.push_back({s, s + seg.length, psi, curvature, ne});

    const double a0 = entry[k];
    const double b0 = entry[k + 1];
    double vc = std::max({seg.speed, a0, b0});
    double d_acc = (vc * vc - a0 * a0) / (2.0 * accel);
    double d_dec = (vc * vc - b0 * b0) / (2.0 * accel);
    if (d_acc + d_dec > seg.length) {
      vc = std::sqrt(accel * seg.length + 0.5 * (a0 * a0 + b0 * b0));
      if (vc + 1e-9 < std::max(a0, b0)) {
        throw std::invalid_argument(
            "segment too short for the required speed change");
      }
      d_acc = (vc * vc - a0 * a0) / (2.0 * accel);
      d_dec = (vc * vc - b0 * b0) / (2.0 * accel);
    }
    push_blend(a0, vc, (vc - a0) / accel);
    push_constant(vc, (seg.length - d_acc - d_dec) / std::max(vc, 1e-12));
    push_blend(vc, b0, (vc - b0) / accel);

    // Advance the planar geometry to the segment end.
    if (seg.type == Segment::Type::kArc) {
      const double r = seg.radius;
      const double sgn = seg.sweep > 0 ? 1.0 : -1.0;
      const Eigen::Vector2d center =
          ne + r * Eigen::Vector2d(-std::sin(psi) * sgn, std::cos(psi) * sgn);
      const double psi_end = psi + seg.sweep;
      ne = center - r * Eigen::Vector2d(-std::sin(psi_end) * sgn,
                                        std::cos(psi_end) * sgn);
      psi = psi_end;
    } else {
      ne += seg.length * Eigen::Vector2d(std::cos(psi), std::sin(psi));
    }
  }
  duration_ = t;
}

double TrajectoryModel::total_distance() const {
  const ProfilePiece& last = profile_.back();
  return last.s0 + 0.5 * (last.v0 + last.v1) * last.dt;
}

const TrajectoryModel::ProfilePiece& TrajectoryModel::piece_at(double t) const {
  auto it = std::upper_bound(
      profile_.begin(), profile_.end(), t,
      [](double value, const ProfilePiece& p) { return value < p.t0; });
  if (it != profile_.begin()) --it;
  return *it;
}

const TrajectoryModel::GeometryPiece& TrajectoryModel::geometry_at(
    double s) const {
  auto it = std::upper_bound(
      geometry_.begin(), geometry_.end(), s,
      [](double value, const GeometryPiece& g) { return value < g.s0; });
  if (it != geometry_.begin()) --it;
  while (it + 1 != geometry_.end() && it->s1 <= s && (it + 1)->s0 <= s) ++it;
  return *it;
}

double TrajectoryModel::distance(double t) const {
  t = std::clamp(t, 0.0, duration_);
  const ProfilePiece& p = piece_at(t);
  const double tau = t - p.t0;
  if (p.kind == ProfilePiece::Kind::kConstant) {
    return p.s0 + p.v0 * tau;
  }
  return p.s0 + blend_distance(p.v0, p.v1, p.dt, tau / p.dt);
}

double TrajectoryModel::speed(double t) const {
  t = std::clamp(t, 0.0, duration_);
  const ProfilePiece& p = piece_at(t);
  if (p.kind == ProfilePiece::Kind::kConstant) return p.v0;
  return blend_speed(p.v0, p.v1, (t - p.t0) / p.dt);
}

double TrajectoryModel::heading(double t) const {
  const double s = distance(t);
  const GeometryPiece& g = geometry_at(s);
  return geo::wrap_pi(g.heading0 + g.curvature * (s - g.s0));
}

double TrajectoryModel::yaw_rate(double t) const {
  const double s = distance(t);
  return geometry_at(s).curvature * speed(t);
}

Eigen::Vector2d TrajectoryModel::planar_position(double t) const {
  const double s = distance(t);
  const GeometryPiece& g = geometry_at(s);
  const double ds = s - g.s0;
  if (g.curvature == 0.0) {
    return g.start +
           ds * Eigen::Vector2d(std::cos(g.heading0), std::sin(g.heading0));
  }
  const double r = 1.0 / std::abs(g.curvature);
  const double sgn = g.curvature > 0 ? 1.0 : -1.0;
  const Eigen::Vector2d center =
      g.start + r * Eigen::Vector2d(-std::sin(g.heading0) * sgn,
                                    std::cos(g.heading0) * sgn);
  const double psi = g.heading0 + g.curvature * ds;
  return center -
         r * Eigen::Vector2d(-std::sin(psi) * sgn, std::cos(psi) * sgn);
}

geo::GeodeticPosition TrajectoryModel::wheel_position(double t) const {
  const Eigen::Vector2d ne = planar_position(t);
  geo::GeodeticPosition pos = origin_;
  pos.lat += ne.x() / rm_origin_;
  pos.lon += ne.y() / (rn_origin_ * std::cos(origin_.lat));
  return pos;
}

geo::NedVector TrajectoryModel::wheel_velocity(double t) const {
  const double v = speed(t);
  const double head = heading(t);
  return {v * std::cos(head), v * std::sin(head), 0.0};
}

}  // namespace hubnav::sim
