#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hubnav/eskf/filter.hpp"
#include "hubnav/eskf/process_model.hpp"
#include "hubnav/io/config.hpp"
#include "hubnav/io/formats.hpp"
#include "hubnav/wheel/gating.hpp"

namespace hubnav::fusion {

struct FilterDivergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One fusion run over IMU + GNSS streams. Strictly sequential and
/// deterministic: identical inputs and configuration give bit-identical
/// output logs.
///
/// Schedule: covariance prediction at the IMU rate; the wheel-velocity (and,
/// while the gate is open and the mounting is not yet fixed, the wheel-rate)
/// update at the configured velocity rate using the window-averaged gyro and
/// the mid-window navigation state; a GNSS update per non-outage fix with the
/// state interpolated to the fix epoch; closed-loop feedback after every
/// accepted update; logs at 10 Hz.
class FusionSession {
 public:
  struct Disable {
    bool velocity = false;
    bool gnss = false;
    bool wheel_rate = false;
  };

  FusionSession(const geo::EarthModel& earth, const io::RunConfig& config,
                const eskf::FullState& initial)
      : FusionSession(earth, config, initial, Disable()) {}
  FusionSession(const geo::EarthModel& earth, const io::RunConfig& config,
                const eskf::FullState& initial, const Disable& disable);

  /// Feed the next raw IMU sample (strictly increasing time).
  void process_imu(const ins::ImuSample& raw);

  /// Feed a GNSS fix with fix.t <= current time (driver merges by time).
  void process_gnss(const wheel::GnssFix& fix);

  const eskf::FullState& state() const { return state_; }
  const eskf::Covariance& covariance() const { return cov_; }
  double time() const { return state_.nav.t; }
  bool mounting_fixed() const { return fixer_.is_fixed(); }
  std::size_t stale_fixes() const { return stale_fixes_; }
  std::size_t withheld_fixes() const { return withheld_fixes_; }

  const std::vector<sim::TruthRecord>& nav_log() const { return nav_log_; }
  const std::vector<io::ParamLogRecord>& param_log() const {
    return param_log_;
  }
  const std::vector<io::InnovationRecord>& innovation_log() const {
    return innovation_log_;
  }

  /// Wheel-center solution derived from the current state.
  sim::TruthRecord wheel_center_record() const;

  /// Invoked after every log epoch (testing/Monte-Carlo hook).
  std::function<void(const FusionSession&)> on_log;

 private:
  void apply_update(const wheel::MeasurementBlock& block);
  void run_velocity_epoch();
  void check_health() const;
  void log_epoch();

  geo::EarthModel earth_;
  io::RunConfig config_;
  Disable disable_;
  eskf::ProcessNoiseConfig noise_;  // masked copy; mounting zeroed when fixed
  eskf::FullState state_;
  eskf::Covariance cov_ = eskf::Covariance::Zero();
  eskf::ErrorState error_ = eskf::ErrorState::Zero();

  wheel::StraightLineGate gate_;
  wheel::ConvergenceFixer fixer_;

  bool started_ = false;
  double start_time_ = 0.0;
  ins::ImuSample prev_comp_;
  std::optional<ins::ImuSample> prev2_comp_;
  ins::NavState nav_prev_;
  Eigen::Vector3d last_gyro_ = Eigen::Vector3d::Zero();

  // Velocity-update window accumulation.
  Eigen::Vector3d gyro_sum_ = Eigen::Vector3d::Zero();
  std::size_t gyro_count_ = 0;
  std::optional<ins::NavState> window_mid_;
  long vel_epoch_ = 1;
  long log_epoch_index_ = 0;

  std::size_t stale_fixes_ = 0;
  std::size_t withheld_fixes_ = 0;
  int consecutive_rejects_[3] = {0, 0, 0};

  std::vector<sim::TruthRecord> nav_log_;
  std::vector<io::ParamLogRecord> param_log_;
  std::vector<io::InnovationRecord> innovation_log_;
};

/// Convenience driver: merge the streams by time and run to the end.
struct FusionResult {
  std::vector<sim::TruthRecord> nav;
  std::vector<io::ParamLogRecord> params;
  std::vector<io::InnovationRecord> innovations;
  eskf::FullState final_state;
  eskf::Covariance final_cov;
};

FusionResult run_fusion(
    const geo::EarthModel& earth, const io::RunConfig& config,
    const eskf::FullState& initial, const std::vector<ins::ImuSample>& imu,
    const std::vector<wheel::GnssFix>& gnss,
    const FusionSession::Disable& disable = FusionSession::Disable(),
    const std::function<void(const FusionSession&)>& on_log = nullptr);

/// Initial full state from the configured position/heading/velocity. The
/// initial body attitude assumes zero wheel roll, which the simulator scenarios
/// satisfy at their start.
eskf::FullState initial_state_from_config(const io::RunConfig& config);

/// Initial covariance from the configured sigmas; disabled parameters get
/// zero rows and columns.
eskf::Covariance initial_covariance(const io::RunConfig& config);

}  // namespace hubnav::fusion
