#pragma once

#include <string>
#include <vector>

#include "hubnav/eskf/process_model.hpp"
#include "hubnav/sim/simulator.hpp"
#include "hubnav/wheel/gating.hpp"
#include "hubnav/wheel/installation.hpp"
#include "hubnav/wheel/models.hpp"

namespace hubnav::io {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Initial 1-sigma uncertainties for the filter covariance.
struct InitialStd {
  double position = 1.0;               // m, per NED axis
  double velocity = 0.1;               // m/s
  double attitude_horizontal = 0.5 * 0.017453292519943295;  // rad, roll/pitch
  double attitude_heading = 1.0 * 0.017453292519943295;  // rad
  double gyro_bias =
      200.0 * 0.017453292519943295 / 3600.0;  // rad/s (200 deg/h)
  double accel_bias = 0.01;            // m/s^2
  double gyro_scale = 0.03;
  double accel_scale = 0.03;
  double leverarm = 0.05;              // m
  double mounting = 2.0 * 0.017453292519943295;  // rad
  double radius_scale = 0.005;
};

/// Full run configuration parsed from the INI file. Every optional key has
/// exactly one default (documented in docs/FORMATS.md); unknown keys are
/// rejected.
struct RunConfig {
  // [paths]
  std::string imu_path;
  std::string gnss_path;
  std::string truth_path;
  std::string output_dir = ".";

  // [initial]
  geo::GeodeticPosition initial_pos;
  double initial_heading = 0.0;  // rad
  Eigen::Vector3d initial_vel = Eigen::Vector3d::Zero();
  bool has_initial_pos = false;

  // [initial_std]
  InitialStd initial_std;

  // [process_noise]
  eskf::ProcessNoiseConfig process_noise;

  // [installation] - filter-side initial values
  wheel::InstallationParams install;
  bool has_wheel_radius = false;

  // [measurement]
  wheel::VelocityNoise velocity_noise;
  double sigma_wheel_rate = 0.0;  // rad/s; 0 derives it from the ARW
  double gnss_std_override = 0.0;  // m; 0 keeps per-fix sigmas

  // [rates]
  double velocity_update_hz = 2.0;
  double gnss_rate_hz = 1.0;

  // [outages] - pipeline-level fix filtering, [start, end) seconds
  std::vector<std::pair<double, double>> outage_windows;

  // [gates]
  double chi_square_confidence = 0.995;
  bool chi_square_enabled = true;
  wheel::StraightLineGate::Config turn_gate;
  wheel::ConvergenceFixer::Config fixer;

  // [features]
  bool estimate_leverarm = true;
  bool estimate_mounting = true;
  bool estimate_radius_scale = true;
  bool wheel_rate_constraint = true;

  // [simulation] + [trajectory]
  sim::SimConfig sim;
  bool has_trajectory = false;
};

/// Parse an INI-style config. Throws ConfigError naming the offending key or
/// line for unknown keys, duplicate keys, type mismatches, and missing
/// required keys (installation.wheel_radius_m).
RunConfig parse_config(const std::string& path);

/// Parse an outage override like "100:160,300:360" (seconds).
std::vector<std::pair<double, double>> parse_outage_list(const std::string& s);

}  // namespace hubnav::io
