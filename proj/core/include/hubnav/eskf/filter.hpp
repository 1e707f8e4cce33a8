#pragma once

#include <Eigen/Core>

#include "hubnav/eskf/state_index.hpp"
#include "hubnav/geo/earth.hpp"
#include "hubnav/ins/imu.hpp"
#include "hubnav/ins/mechanization.hpp"
#include "hubnav/wheel/installation.hpp"

namespace hubnav::eskf {

/// Everything the error state corrects: navigation solution, inertial sensor
/// error estimates, and installation parameter estimates.
struct FullState {
  ins::NavState nav;
  ins::ImuErrors imu_errors;
  wheel::InstallationParams install;
};

/// Time update: P <- Phi P Phi' + Qd, symmetrized.
Covariance predict(const Covariance& cov, const StateMatrix& phi,
                   const StateMatrix& qd);

struct UpdateResult {
  ErrorState state = ErrorState::Zero();
  Covariance cov;
  double chi_square = 0.0;
  double gate_threshold = 0.0;
  bool accepted = true;
};

/// Measurement update with the Joseph-form covariance and a chi-square
/// innovation gate. Innovation convention: z = predicted - observed.
/// When the gate trips the state and covariance pass through unchanged and
/// `accepted` is false. Throws std::runtime_error if the innovation
/// covariance is not invertible.
UpdateResult kalman_update(const Covariance& cov, const ErrorState& state,
                           const Eigen::MatrixXd& h, const Eigen::VectorXd& z,
                           const Eigen::MatrixXd& r,
                           double gate_confidence = 0.995,
                           bool gate_enabled = true);

/// Closed-loop correction: fold the estimated errors into the full state and
/// return the error state reset to zero.
FullState feedback(const geo::EarthModel& earth, const FullState& full,
                   ErrorState& state);

/// Chi-square quantile (Wilson-Hilferty), used for the innovation gate.
double chi_square_quantile(double probability, int dof);

}  // namespace hubnav::eskf
