#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hubnav/ins/imu.hpp"
#include "hubnav/ins/mechanization.hpp"
#include "hubnav/sim/trajectory.hpp"
#include "hubnav/wheel/models.hpp"

namespace hubnav::sim {

/// Scenario description: ground-truth motion, installation truth, sensor
/// error classes, rates, and outage windows.
struct SimConfig {
  TrajectorySpec trajectory;
  double dt_internal = 5e-4;  // s, truth grid and differencing step

  // Installation truth. The filter is handed measured_radius =
  // (1 + radius_scale_true) * wheel_radius_true.
  double wheel_radius_true = 0.3;                       // m
  Eigen::Vector2d leverarm_true = Eigen::Vector2d::Zero();   // (l_y, l_z), m
  Eigen::Vector2d mounting_true = Eigen::Vector2d::Zero();   // rad
  double radius_scale_true = 0.0;
  Eigen::Vector3d antenna_lever_v = Eigen::Vector3d::Zero();  // m

  // Sensor error classes; the per-run truth is drawn from these sigmas.
  double gyro_bias_std =
      200.0 * 0.017453292519943295 / 3600.0;  // rad/s (200 deg/h)
  double accel_bias_std = 0.01;         // m/s^2
  double gyro_scale_std = 0.03;
  double accel_scale_std = 0.03;
  double angle_random_walk =
      0.24 * 0.017453292519943295 / 60.0;  // rad/sqrt(s) (0.24 deg/sqrt(h))
  double velocity_random_walk = 0.05;      // m/s/sqrt(s)

  double imu_rate_hz = 200.0;
  double gnss_rate_hz = 1.0;
  double gnss_std_m = 0.02;  // per NED axis
  std::vector<std::pair<double, double>> outage_windows;  // [start, end), s

  bool include_earth_rotation = true;
  std::uint64_t seed = 1;

  /// Zero all stochastic content (for oracle-grade runs).
  void zero_errors();
};

/// Deterministic measurement synthesis over a TrajectoryModel. All geometry
/// is exact; the specific force comes from second central differences of the
/// IMU-point path on the internal grid, so noise-free data is kinematically
/// consistent with the mechanization model.
class Simulator {
 public:
  explicit Simulator(const geo::EarthModel& earth, const SimConfig& config);

  const SimConfig& config() const { return config_; }
  const TrajectoryModel& model() const { return model_; }
  const ins::ImuErrors& true_imu_errors() const { return imu_errors_; }

  /// Measured wheel radius handed to the filter (Eq-style scale truth).
  double measured_radius() const {
    return (1.0 + config_.radius_scale_true) * config_.wheel_radius_true;
  }

  /// Truth stream at the given step.
  std::vector<TruthRecord> truth(double dt) const;

  TruthRecord truth_at(double t) const;

  /// Corrupted IMU stream at the configured rate.
  std::vector<ins::ImuSample> synthesize_imu() const;

  /// GNSS fixes at the configured rate; fixes inside outage windows are
  /// withheld (noise draws are made for every epoch regardless).
  std::vector<wheel::GnssFix> synthesize_gnss() const;

  /// Noise-free IMU into the mechanization from the true initial state;
  /// returns the max horizontal deviation from the true IMU path, m.
  double roundtrip_check() const;

  /// True IMU-point navigation state (useful as an exact initial state).
  ins::NavState imu_nav_state(double t) const;

  geo::GeodeticPosition imu_position(double t) const;

 private:
  Eigen::Matrix3d body_attitude(double t) const;
  Eigen::Vector3d lever_offset_n(double t) const;
  Eigen::Vector3d lever_offset_rate_n(double t) const;
  Eigen::Vector3d true_gyro(double t) const;
  Eigen::Vector3d true_accel(double t) const;
  geo::NedVector imu_velocity(double t) const;

  geo::EarthModel earth_;
  SimConfig config_;
  TrajectoryModel model_;
  double rm_origin_ = 0.0;
  double rn_origin_ = 0.0;
  ins::ImuErrors imu_errors_;  // drawn truth
};

}  // namespace hubnav::sim
