#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hubnav::sim {

/// Deterministic Gaussian stream: mt19937_64 plus an explicit Box-Muller
/// transform, so draws are bit-reproducible for a given seed independent of
/// the standard library's distribution implementation.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  double next(double sigma) { return sigma * next(); }

 private:
  double uniform() {
    // 53-bit mantissa uniform in [0, 1).
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace hubnav::sim
