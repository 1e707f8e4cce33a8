#pragma once

#include <vector>

#include <Eigen/Core>

#include "hubnav/geo/earth.hpp"
#include "hubnav/geo/geodetic.hpp"

namespace hubnav::sim {

struct Segment {
  enum class Type { kStraight, kArc, kDwell };
  Type type = Type::kStraight;
  double length = 0.0;    // m, straight/arc (arc: radius * |sweep|)
  double radius = 0.0;    // m, arc (> 0)
  double sweep = 0.0;     // rad, arc, signed (+ = clockwise/right in NED)
  double speed = 0.0;     // m/s target, straight/arc
  double duration = 0.0;  // s, dwell

  static Segment straight(double length, double speed);
  static Segment arc(double radius, double sweep, double speed);
  static Segment dwell(double duration);
};

struct TrajectorySpec {
  geo::GeodeticPosition origin;
  double initial_heading = 0.0;  // rad
  std::vector<Segment> segments;
  double accel_limit = 1.0;  // m/s^2, mean ramp acceleration
};

/// Ground-truth record for one epoch. Position and velocity refer to the
/// wheel center; attitude is the body (IMU) frame.
struct TruthRecord {
  double t = 0.0;
  geo::GeodeticPosition pos;
  geo::NedVector vel = geo::NedVector::Zero();
  double vehicle_heading = 0.0;  // psi_v, rad
  double wheel_angle = 0.0;      // alpha, rad, distance / radius
  Eigen::Matrix3d att = Eigen::Matrix3d::Identity();  // R_b^n
};

/// Closed-form planar kinematics over the segment list. The world is flat at
/// the origin height; planar north/east coordinates map to geodetic ones
/// through the curvature radii frozen at the origin, so loops close exactly.
/// Speed transitions are smoothstep-blended ramps (continuous acceleration)
/// sized by the accel limit; dwell boundaries require a full stop. Throws
/// std::invalid_argument for infeasible specs.
class TrajectoryModel {
 public:
  TrajectoryModel(const geo::EarthModel& earth, const TrajectorySpec& spec,
                  double wheel_radius);

  double duration() const { return duration_; }
  double total_distance() const;

  double distance(double t) const;  // path length s(t), m
  double speed(double t) const;     // m/s
  double heading(double t) const;   // psi_v, rad
  double yaw_rate(double t) const;  // rad/s
  double wheel_angle(double t) const { return distance(t) / wheel_radius_; }
  double wheel_rate(double t) const { return speed(t) / wheel_radius_; }

  /// Planar north/east coordinates of the wheel center, m from the origin.
  Eigen::Vector2d planar_position(double t) const;

  geo::GeodeticPosition wheel_position(double t) const;
  geo::NedVector wheel_velocity(double t) const;

 private:
  struct ProfilePiece {
    enum class Kind { kConstant, kBlend };
    Kind kind;
    double t0, dt, s0, v0, v1;  // blend ramps v0 -> v1 over dt
  };
  struct GeometryPiece {
    double s0, s1, heading0, curvature;  // signed curvature, 1/m (0 straight)
    Eigen::Vector2d start;               // planar NE at s0
  };

  const ProfilePiece& piece_at(double t) const;
  const GeometryPiece& geometry_at(double s) const;

  double wheel_radius_;
  double duration_ = 0.0;
  double rm_origin_ = 0.0;  // meridian radius + height, frozen at the origin
  double rn_origin_ = 0.0;  // prime-vertical radius + height, frozen
  geo::GeodeticPosition origin_;
  std::vector<ProfilePiece> profile_;
  std::vector<GeometryPiece> geometry_;
};

}  // namespace hubnav::sim
