#pragma once

#include <deque>
#include <optional>

#include <Eigen/Core>

namespace hubnav::wheel {

/// Detects turning from the non-spin (wheel-frame y/z) angular rate. The
/// wheel-rate constraint is only valid while the vehicle rolls straight.
class StraightLineGate {
 public:
  struct Config {
    double window = 1.0;        // s of history required and inspected
    double threshold =
        0.5 * 0.017453292519943295;  // rad/s (0.5 deg/s), smoothed deviation
    double smoothing = 0.1;     // s, boxcar length for the deviation
  };

  StraightLineGate() : StraightLineGate(Config()) {}
  explicit StraightLineGate(const Config& config) : config_(config) {}

  /// Feed one compensated sample already mapped to the wheel frame (y/z
  /// components of R_b^w * omega).
  void add_sample(double t, const Eigen::Vector2d& omega_w_yz);

  /// Open iff a full window is present and the smoothed deviation of the
  /// non-spin rate from its window mean stays below threshold throughout.
  bool is_open() const;

  void reset() { samples_.clear(); }

 private:
  struct Sample {
    double t;
    Eigen::Vector2d yz;
  };
  Config config_;
  std::deque<Sample> samples_;
};

/// Latches the mounting-angle estimate once its marginal standard deviations
/// have stayed below a threshold for a hold period. One-way per session.
class ConvergenceFixer {
 public:
  struct Config {
    double std_threshold = 0.05 * 0.017453292519943295;  // rad (0.05 deg)
    double hold_time = 10.0;             // s
  };

  ConvergenceFixer() : ConvergenceFixer(Config()) {}
  explicit ConvergenceFixer(const Config& config) : config_(config) {}

  /// Feed the current mounting-angle marginal sigmas; returns is_fixed().
  bool observe(double t, double std_pitch, double std_heading);

  bool is_fixed() const { return fixed_; }

 private:
  Config config_;
  std::optional<double> below_since_;
  bool fixed_ = false;
};

}  // namespace hubnav::wheel
