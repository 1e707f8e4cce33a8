#pragma once

#include <string>
#include <vector>

#include "hubnav/ins/imu.hpp"
#include "hubnav/sim/trajectory.hpp"
#include "hubnav/wheel/models.hpp"

namespace hubnav::io {

/// Parse/format error carrying the offending file and line.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Estimated installation parameters with their marginal sigmas.
struct ParamLogRecord {
  double t = 0.0;
  Eigen::Vector2d leverarm = Eigen::Vector2d::Zero();   // m
  Eigen::Vector2d mounting = Eigen::Vector2d::Zero();   // rad
  double radius_scale = 0.0;
  Eigen::Vector2d leverarm_std = Eigen::Vector2d::Zero();
  Eigen::Vector2d mounting_std = Eigen::Vector2d::Zero();
  double radius_scale_std = 0.0;
};

/// One measurement-update attempt.
struct InnovationRecord {
  double t = 0.0;
  wheel::MeasurementKind kind = wheel::MeasurementKind::kVelocity;
  int dof = 0;
  double chi_square = 0.0;
  double gate_threshold = 0.0;
  bool accepted = true;
  Eigen::Vector3d z = Eigen::Vector3d::Zero();  // padded with zeros for dof 2
};

// Plain-text, whitespace-separated column files with '#' headers. Angles are
// stored in degrees at 9 decimals, meters and m/s at 4 decimals; see
// docs/FORMATS.md for the exact column contracts.

std::vector<ins::ImuSample> parse_imu(const std::string& path);
std::vector<wheel::GnssFix> parse_gnss(const std::string& path);
std::vector<sim::TruthRecord> parse_trajectory(const std::string& path);
std::vector<ParamLogRecord> parse_param_log(const std::string& path);

void write_imu(const std::string& path, const std::vector<ins::ImuSample>& v);
void write_gnss(const std::string& path, const std::vector<wheel::GnssFix>& v);
void write_trajectory(const std::string& path,
                      const std::vector<sim::TruthRecord>& v);
void write_param_log(const std::string& path,
                     const std::vector<ParamLogRecord>& v);
void write_innovation_log(const std::string& path,
                          const std::vector<InnovationRecord>& v);

}  // namespace hubnav::io
