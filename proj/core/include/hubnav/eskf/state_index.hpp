#pragma once

#include <Eigen/Core>

namespace hubnav::eskf {

/// Frozen error-state layout. Every H builder, the process model, and the
/// feedback step index the state through these constants.
namespace idx {
inline constexpr int kPos = 0;          // NED position error, m (3)
inline constexpr int kVel = 3;          // NED velocity error, m/s (3)
inline constexpr int kAtt = 6;          // attitude error phi, rad (3)
inline constexpr int kGyroBias = 9;     // rad/s (3)
inline constexpr int kAccelBias = 12;   // m/s^2 (3)
inline constexpr int kGyroScale = 15;   // unitless (3)
inline constexpr int kAccelScale = 18;  // unitless (3)
inline constexpr int kLeverArm = 21;    // (y, z), m (2)
inline constexpr int kMounting = 23;    // (pitch, heading), rad (2)
inline constexpr int kRadiusScale = 25; // unitless (1)
inline constexpr int kDim = 26;
}  // namespace idx

using ErrorState = Eigen::Matrix<double, idx::kDim, 1>;
using Covariance = Eigen::Matrix<double, idx::kDim, idx::kDim>;
using StateMatrix = Eigen::Matrix<double, idx::kDim, idx::kDim>;

}  // namespace hubnav::eskf
