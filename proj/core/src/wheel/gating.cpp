#include "hubnav/wheel/gating.hpp"

#include <cmath>

namespace hubnav::wheel {

void StraightLineGate::add_sample(double t, const Eigen::Vector2d& omega_w_yz) {
  samples_.push_back({t, omega_w_yz});
  const double cutoff = t - config_.window;
  while (!samples_.empty() && samples_.front().t < cutoff) {
    samples_.pop_front();
  }
}

bool StraightLineGate::is_open() const {
  if (samples_.size() < 2) return false;
  if (samples_.back().t - samples_.front().t < 0.9 * config_.window) {
    return false;  // insufficient history
  }

  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const Sample& s : samples_) mean += s.yz;
  mean /= static_cast<double>(samples_.size());

  // Boxcar-smoothed deviation magnitude; the smoothing suppresses sensor
  // noise so the threshold can sit well below typical turn rates.
  std::size_t head = 0;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    sum += (samples_[i].yz - mean).norm();
    ++count;
    while (samples_[head].t < samples_[i].t - config_.smoothing) {
      sum -= (samples_[head].yz - mean).norm();
      --count;
      ++head;
    }
    if (sum / static_cast<double>(count) > config_.threshold) {
      return false;
    }
  }
  return true;
}

bool ConvergenceFixer::observe(double t, double std_pitch, double std_heading) {
  if (fixed_) return true;
  if (std_pitch < config_.std_threshold && std_heading < config_.std_threshold) {
    if (!below_since_) below_since_ = t;
    if (t - *below_since_ >= config_.hold_time) fixed_ = true;
  } else {
    below_since_.reset();
  }
  return fixed_;
}

}  // namespace hubnav::wheel
