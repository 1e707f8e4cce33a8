#include "hubnav/ins/imu.hpp"

#include <stdexcept>

namespace hubnav::ins {

ImuSample compensate(const ImuSample& raw, const ImuErrors& errors) {
  for (int i = 0; i < 3; ++i) {
    if (errors.gyro_scale[i] <= -1.0 || errors.accel_scale[i] <= -1.0) {
      throw std::invalid_argument(
          "imu scale factor <= -1: error model not invertible");
    }
  }
  ImuSample out;
  out.t = raw.t;
  out.gyro = (raw.gyro - errors.gyro_bias).array() /
             (1.0 + errors.gyro_scale.array());
  out.accel = (raw.accel - errors.accel_bias).array() /
              (1.0 + errors.accel_scale.array());
  return out;
}

}  // namespace hubnav::ins
