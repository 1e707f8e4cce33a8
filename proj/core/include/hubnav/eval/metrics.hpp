#pragma once

#include <string>
#include <vector>

#include "hubnav/geo/earth.hpp"
#include "hubnav/io/formats.hpp"
#include "hubnav/sim/trajectory.hpp"

namespace hubnav::eval {

struct WindowStats {
  double start = 0.0;
  double end = 0.0;
  double rmse = 0.0;       // horizontal, m
  double max_error = 0.0;  // horizontal, m
  std::size_t epochs = 0;
};

struct MetricsReport {
  double horizontal_rmse = 0.0;  // m
  double height_rmse = 0.0;      // m
  double heading_rmse_deg = 0.0;
  std::size_t epochs = 0;
  std::vector<WindowStats> windows;
};

struct EpochError {
  double t = 0.0;
  double north = 0.0;
  double east = 0.0;
  double down = 0.0;
  double horizontal = 0.0;
  double heading_deg = 0.0;  // wrapped to (-180, 180]
};

/// Truth interpolated to the estimate epochs over the overlapping range.
/// Heading error compares the horizontal direction of the body x-axis, which
/// is insensitive to the wheel roll angle. Throws std::invalid_argument when
/// the time ranges do not overlap.
std::vector<EpochError> per_epoch_errors(
    const geo::EarthModel& earth, const std::vector<sim::TruthRecord>& estimate,
    const std::vector<sim::TruthRecord>& truth);

MetricsReport evaluate_trajectory(
    const geo::EarthModel& earth, const std::vector<sim::TruthRecord>& estimate,
    const std::vector<sim::TruthRecord>& truth,
    const std::vector<std::pair<double, double>>& windows);

void write_metrics(const std::string& path, const MetricsReport& report);
void write_epoch_errors(const std::string& path,
                        const std::vector<EpochError>& errors);

struct ParamTruth {
  Eigen::Vector2d leverarm = Eigen::Vector2d::Zero();  // m
  Eigen::Vector2d mounting = Eigen::Vector2d::Zero();  // rad
  double radius_scale = 0.0;
};

struct ConvergenceBands {
  double leverarm = 0.005;          // m
  double mounting = 0.1 * 0.017453292519943295;  // rad (0.1 deg)
  double radius_scale = 0.001;
  double hold = 10.0;               // s the estimate must stay in band
};

struct ParamConvergence {
  std::string name;
  bool converged = false;
  double time = 0.0;         // s from log start
  double final_error = 0.0;  // same unit as the parameter
  double final_std = 0.0;
};

/// Convergence time: first instant after which the estimate stays within the
/// band of truth for the hold period.
std::vector<ParamConvergence> assess_params(
    const std::vector<io::ParamLogRecord>& log, const ParamTruth& truth,
    const ConvergenceBands& bands);

}  // namespace hubnav::eval
